// Contract tests against recorded API responses: the dashboard must place
// every fixture hypothesis in the bucket the threshold rule dictates, and
// must take that bucket from the server rather than recomputing it.

import { readdirSync, readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { describe, expect, it } from 'vitest';

import {
  DashboardController,
  QUADRANTS,
  buildDashboardView,
  evidenceSliderMax,
  groupByQuadrant,
} from '../src/dashboard.js';
import type { DashboardResponse, QuadrantName } from '../src/types.js';

const fixturesDir = join(dirname(fileURLToPath(import.meta.url)), '..', 'fixtures');
const dashboardFixtures = readdirSync(fixturesDir)
  .filter((name) => name.startsWith('dashboard_'))
  .map((name) => ({
    name,
    response: JSON.parse(readFileSync(join(fixturesDir, name), 'utf-8')) as DashboardResponse,
  }));

// Test-local oracle for the published bucket rule; boundary equality passes.
function quadrantOracle(dobMean: number, woeTotal: number, thetaB: number, thetaE: number): QuadrantName {
  const believed = dobMean >= thetaB;
  const evidenced = woeTotal >= thetaE;
  if (believed && evidenced) return 'green';
  if (believed) return 'red';
  if (evidenced) return 'amber';
  return 'white_contentious';
}

describe('recorded dashboard fixtures', () => {
  it('cover three slider settings with twenty hypotheses each', () => {
    expect(dashboardFixtures).toHaveLength(3);
    for (const { response } of dashboardFixtures) {
      expect(response.entries).toHaveLength(20);
    }
    const settings = new Set(
      dashboardFixtures.map(({ response }) => `${response.thresholds.theta_belief}/${response.thresholds.theta_evidence}`),
    );
    expect(settings.size).toBe(3);
  });

  it('exercise all four quadrants somewhere in the set', () => {
    const seen = new Set<QuadrantName>();
    for (const { response } of dashboardFixtures) {
      for (const entry of response.entries) seen.add(entry.quadrant);
    }
    expect([...seen].sort()).toEqual([...QUADRANTS].sort());
  });

  for (const { name, response } of dashboardFixtures) {
    it(`bucket rendering matches the threshold rule for ${name}`, () => {
      const { theta_belief, theta_evidence } = response.thresholds;
      const buckets = groupByQuadrant(response.entries);
      let placed = 0;
      for (const quadrant of QUADRANTS) {
        for (const entry of buckets[quadrant]) {
          expect(quadrant).toBe(quadrantOracle(entry.dob.mean, entry.woe.total, theta_belief, theta_evidence));
          placed += 1;
        }
      }
      expect(placed).toBe(response.entries.length);
    });
  }

  it('server quadrant field is authoritative even when implausible', () => {
    // If the client recomputed buckets this entry would land in green;
    // the contract is to render what the API said.
    const doctored = {
      ...dashboardFixtures[0].response.entries[0],
      quadrant: 'white_contentious' as QuadrantName,
      dob: { ...dashboardFixtures[0].response.entries[0].dob, mean: 0.99 },
      woe: { ...dashboardFixtures[0].response.entries[0].woe, total: 99 },
    };
    const buckets = groupByQuadrant([doctored]);
    expect(buckets.white_contentious).toHaveLength(1);
    expect(buckets.green).toHaveLength(0);
  });
});

describe('dashboard view', () => {
  it('plots belief on x and evidence weight on y', () => {
    const view = buildDashboardView(dashboardFixtures[0].response);
    for (const point of view.scatter) {
      const entry = dashboardFixtures[0].response.entries.find(
        (e) => e.hypothesis.hypothesis_id === point.hypothesisId,
      )!;
      expect(point.x).toBe(entry.dob.mean);
      expect(point.y).toBe(entry.woe.total);
    }
  });

  it('sizes the evidence slider to the workspace maximum on a 0.1 grid', () => {
    const entries = dashboardFixtures[0].response.entries;
    const max = evidenceSliderMax(entries);
    const top = Math.max(...entries.map((e) => e.woe.total));
    expect(max).toBeGreaterThanOrEqual(top);
    expect(max - top).toBeLessThan(0.1 + 1e-9);
    expect(Math.round(max * 10)).toBeCloseTo(max * 10, 6);
  });

  it('re-queries the server on every slider release', async () => {
    const calls: Array<[number, number]> = [];
    const controller = new DashboardController(async (b, e) => {
      calls.push([b, e]);
      return dashboardFixtures[0].response;
    });
    controller.moveSliders(0.4, 7.5);
    controller.moveSliders(0.6, 9.0); // drags without release do not query
    expect(calls).toHaveLength(0);
    await controller.release();
    expect(calls).toEqual([[0.6, 9.0]]);
    await controller.release();
    expect(calls).toHaveLength(2);
  });

  it('clamps the belief slider into [0, 1]', async () => {
    const calls: Array<[number, number]> = [];
    const controller = new DashboardController(async (b, e) => {
      calls.push([b, e]);
      return dashboardFixtures[0].response;
    });
    controller.moveSliders(1.7, -3);
    await controller.release();
    expect(calls).toEqual([[1, 0]]);
  });
});
