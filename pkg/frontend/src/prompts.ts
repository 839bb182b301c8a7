// Debiasing nudges. Two prompts: probe for refuting evidence on hypotheses
// the viewer endorsed without counter-evidence, and ask for a conflicting
// reason while drafting a new hypothesis (counter-anchor).

import type { HypothesisSummary } from './types.js';

export function shouldPromptForRefutingEvidence(summary: HypothesisSummary): boolean {
  return summary.viewer_vote === 'up' && summary.n_refuting === 0;
}

export function refutingEvidencePrompt(summary: HypothesisSummary): string {
  return (
    `You upvoted "${summary.title}" but it has no refuting evidence yet. ` +
    `Know of a source that cuts the other way? Adding it strengthens the group's judgment.`
  );
}

export function counterAnchorPrompt(draftTitle: string): string | null {
  if (!draftTitle.trim()) return null;
  return (
    `Before posting: what is one reason this might be wrong, or an alternative ` +
    `that would explain the same evidence? Consider adding it as refuting evidence ` +
    `or a rival hypothesis.`
  );
}
