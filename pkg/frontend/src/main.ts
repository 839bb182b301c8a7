// Single-page wiring: sign-in, feed with polling, evidence form, dashboard.
// All state flows one way: server response -> view-model -> DOM.

import { ApiClient, ApiError } from './api.js';
import { DashboardController, QUADRANTS } from './dashboard.js';
import { submitEvidence } from './evidenceForm.js';
import { buildHorseCard, renderHorseCard } from './horseCard.js';
import { refutingEvidencePrompt, shouldPromptForRefutingEvidence, counterAnchorPrompt } from './prompts.js';
import { QUALITY_RUBRIC } from './rubric.js';
import type { HypothesisSummary } from './types.js';

const POLL_INTERVAL_MS = 15_000;

const api = new ApiClient('');
let summaries: HypothesisSummary[] = [];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function refreshFeed(): Promise<void> {
  const response = await api.listHypotheses();
  summaries = response.hypotheses;
  const feed = el<HTMLDivElement>('feed');
  feed.innerHTML = summaries.map((s) => renderHorseCard(buildHorseCard(s))).join('\n');
  const nudges = summaries.filter(shouldPromptForRefutingEvidence).map(refutingEvidencePrompt);
  el<HTMLDivElement>('nudges').innerHTML = nudges.map((n) => `<p class="nudge">${n}</p>`).join('');
  feed.querySelectorAll('button.vote-up').forEach((b) =>
    b.addEventListener('click', () => castVote((b as HTMLButtonElement).dataset.id!, 'up')),
  );
  feed.querySelectorAll('button.vote-down').forEach((b) =>
    b.addEventListener('click', () => castVote((b as HTMLButtonElement).dataset.id!, 'down')),
  );
}

async function castVote(hypothesisId: string, direction: 'up' | 'down'): Promise<void> {
  try {
    await api.castVote(hypothesisId, direction);
    await refreshFeed();
  } catch (error) {
    reportError(error);
  }
}

function buildTierPicker(): void {
  const select = el<HTMLSelectElement>('evidence-tier');
  select.innerHTML =
    '<option value="">rank the source…</option>' +
    QUALITY_RUBRIC.map((t) => `<option value="${t.tier}">${'★'.repeat(Math.round(t.stars))} ${t.caption}</option>`).join('');
}

async function onEvidenceSubmit(event: Event): Promise<void> {
  event.preventDefault();
  const hypothesisId = el<HTMLSelectElement>('evidence-target').value;
  const tierRaw = el<HTMLSelectElement>('evidence-tier').value;
  const summary = summaries.find((s) => s.hypothesis_id === hypothesisId);
  if (!summary) return;
  const card = { pendingItems: summary.woe.n_items, woeText: '' };
  const outcome = await submitEvidence(
    hypothesisId,
    {
      url: el<HTMLInputElement>('evidence-url').value,
      argumentText: el<HTMLTextAreaElement>('evidence-argument').value,
      argumentKind: el<HTMLSelectElement>('evidence-kind').value,
      polarity: el<HTMLSelectElement>('evidence-polarity').value as 'supports' | 'refutes' | '',
      tier: tierRaw ? Number(tierRaw) : null,
    },
    (id, body) => api.submitEvidence(id, body),
    card,
  );
  const status = el<HTMLParagraphElement>('evidence-status');
  if (outcome.ok) {
    status.textContent = `Added. ${card.woeText}`;
    await refreshFeed();
  } else if (outcome.errors) {
    status.textContent = Object.values(outcome.errors).join(' ');
  } else {
    status.textContent = outcome.serverMessage ?? 'Submission failed.';
  }
}

function wireDashboard(): void {
  const controller = new DashboardController((b, e) => api.dashboard(b, e));
  const beliefSlider = el<HTMLInputElement>('slider-belief');
  const evidenceSlider = el<HTMLInputElement>('slider-evidence');

  async function rerender(): Promise<void> {
    controller.moveSliders(Number(beliefSlider.value), Number(evidenceSlider.value));
    try {
      const view = await controller.release();
      evidenceSlider.max = String(Math.max(view.evidenceSliderMax, Number(evidenceSlider.value)));
      for (const quadrant of QUADRANTS) {
        el<HTMLUListElement>(`bucket-${quadrant}`).innerHTML = view.buckets[quadrant]
          .map((e) => `<li>${e.hypothesis.title} <small>(DoB ${e.dob.display}, WoE ${e.woe.total.toFixed(1)})</small></li>`)
          .join('');
      }
    } catch (error) {
      reportError(error);
    }
  }

  beliefSlider.addEventListener('change', rerender);
  evidenceSlider.addEventListener('change', rerender);
  void rerender();
}

function reportError(error: unknown): void {
  const banner = el<HTMLParagraphElement>('error-banner');
  banner.textContent = error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
}

async function start(): Promise<void> {
  const userId = el<HTMLInputElement>('user-id').value.trim();
  if (!userId) return;
  try {
    await api.openSession(userId);
  } catch (error) {
    reportError(error);
    return;
  }
  el<HTMLDivElement>('workspace').hidden = false;
  buildTierPicker();
  el<HTMLFormElement>('evidence-form').addEventListener('submit', onEvidenceSubmit);
  el<HTMLInputElement>('new-hypothesis-title').addEventListener('input', (ev) => {
    const prompt = counterAnchorPrompt((ev.target as HTMLInputElement).value);
    el<HTMLParagraphElement>('counter-anchor').textContent = prompt ?? '';
  });
  wireDashboard();
  await refreshFeed();
  setInterval(() => void refreshFeed(), POLL_INTERVAL_MS);
}

el<HTMLButtonElement>('sign-in').addEventListener('click', () => void start());
