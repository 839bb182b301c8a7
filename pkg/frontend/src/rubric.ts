// The nine-tier evidence quality rubric. Captions are shown verbatim as
// guidance in the tier picker, best sources first.

export interface RubricTier {
  tier: number;
  stars: number;
  caption: string;
  examples?: string;
}

export const QUALITY_RUBRIC: readonly RubricTier[] = [
  {
    tier: 9,
    stars: 5.0,
    caption: 'Peer reviewed article; Government report',
    examples: 'Australian Journal for Emergency Management; QFES report; Public Choice Journal',
  },
  { tier: 8, stars: 4.5, caption: 'Industry report' },
  {
    tier: 7,
    stars: 4.0,
    caption: 'Investigative or academic journalism; Government media release',
    examples: 'Harvard Business Review; RSPCA',
  },
  {
    tier: 6,
    stars: 3.5,
    caption: 'Trusted news source',
    examples: 'ABC; BBC; New York Times; Washington Post',
  },
  {
    tier: 5,
    stars: 3.0,
    caption: 'Generic news source; Substantiated anecdote or case; Expert opinion',
    examples: 'Brisbane Times; Warwick Daily News; Actual example; Leadership anecdotes; Horsetalk.com.au',
  },
  { tier: 4, stars: 2.5, caption: 'Unsubstantiated anecdote on behalf of community; Well argued point' },
  { tier: 3, stars: 2.0, caption: 'Unsubstantiated anecdote on behalf of individual; Argued point' },
  { tier: 2, stars: 1.5, caption: 'Opinion' },
  { tier: 1, stars: 1.0, caption: 'Feeling' },
];

export function rubricCaption(tier: number): string {
  const entry = QUALITY_RUBRIC.find((t) => t.tier === tier);
  if (!entry) throw new RangeError(`tier must be 1..9, got ${tier}`);
  return entry.caption;
}
