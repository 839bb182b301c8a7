import { describe, expect, it } from 'vitest';

import { QUALITY_RUBRIC, rubricCaption } from '../src/rubric.js';

describe('quality rubric', () => {
  it('has nine tiers, best first', () => {
    expect(QUALITY_RUBRIC).toHaveLength(9);
    expect(QUALITY_RUBRIC.map((t) => t.tier)).toEqual([9, 8, 7, 6, 5, 4, 3, 2, 1]);
  });

  it('shows the top tier caption verbatim', () => {
    expect(rubricCaption(9)).toBe('Peer reviewed article; Government report');
  });

  it('bottoms out at a feeling', () => {
    expect(rubricCaption(1)).toBe('Feeling');
    expect(rubricCaption(2)).toBe('Opinion');
  });

  it('star values follow the half-star ladder', () => {
    for (const entry of QUALITY_RUBRIC) {
      expect(entry.stars).toBeCloseTo(0.5 + 0.5 * entry.tier, 10);
    }
  });

  it('rejects unknown tiers', () => {
    expect(() => rubricCaption(0)).toThrow(RangeError);
    expect(() => rubricCaption(10)).toThrow(RangeError);
  });
});
