// Evidence submission: client-side validation gate, one POST on submit,
// optimistic card update reverted if the server rejects.

import type { EvidenceResponse, WoeResult } from './types.js';

export const ARGUMENT_KINDS = [
  'example',
  'abduction',
  'analogy',
  'defeasible',
  'induction',
  'deduction',
] as const;

export interface EvidenceFormFields {
  url: string;
  argumentText: string;
  argumentKind: string;
  polarity: 'supports' | 'refutes' | '';
  tier: number | null;
}

export interface FieldErrors {
  [field: string]: string;
}

export function validateEvidenceForm(fields: EvidenceFormFields): FieldErrors {
  const errors: FieldErrors = {};
  if (!fields.url.trim()) {
    errors.url = 'Provide the source URL.';
  }
  if (!fields.argumentText.trim()) {
    errors.argumentText = 'Briefly explain how this evidence bears on the hypothesis.';
  }
  if (!ARGUMENT_KINDS.includes(fields.argumentKind as (typeof ARGUMENT_KINDS)[number])) {
    errors.argumentKind = 'Pick the kind of argument being made.';
  }
  if (fields.polarity !== 'supports' && fields.polarity !== 'refutes') {
    errors.polarity = 'Say whether this supports or refutes the hypothesis.';
  }
  if (fields.tier === null || !Number.isInteger(fields.tier) || fields.tier < 1 || fields.tier > 9) {
    errors.tier = 'Rank the source quality on the nine-tier guide.';
  }
  return errors;
}

export type EvidencePoster = (
  hypothesisId: string,
  body: { url: string; argument_text: string; argument_kind: string; polarity: string; tier: number },
) => Promise<EvidenceResponse>;

export interface SubmitOutcome {
  ok: boolean;
  errors?: FieldErrors;
  serverMessage?: string;
  woe?: WoeResult;
}

/**
 * Validate, optimistically bump the card's displayed item count, POST, and
 * reconcile: on success the card adopts the server's weight-of-evidence; on
 * failure the optimistic bump is reverted and the message surfaces inline.
 */
export async function submitEvidence(
  hypothesisId: string,
  fields: EvidenceFormFields,
  post: EvidencePoster,
  card: { pendingItems: number; woeText: string },
): Promise<SubmitOutcome> {
  const errors = validateEvidenceForm(fields);
  if (Object.keys(errors).length > 0) {
    return { ok: false, errors };
  }
  card.pendingItems += 1;
  try {
    const response = await post(hypothesisId, {
      url: fields.url.trim(),
      argument_text: fields.argumentText.trim(),
      argument_kind: fields.argumentKind,
      polarity: fields.polarity,
      tier: fields.tier as number,
    });
    card.pendingItems -= 1;
    card.woeText = `WOE: ${response.woe.total.toFixed(2)}`;
    return { ok: true, woe: response.woe };
  } catch (error) {
    card.pendingItems -= 1; // revert the optimistic bump
    const message = error instanceof Error ? error.message : String(error);
    return { ok: false, serverMessage: message };
  }
}
