// Racing-box geometry: belief 0..1 maps linearly onto 0..100% of the box
// width. Left edge = poorly believed, right edge = winning.

export function mapDobToPosition(dobMean: number): number {
  if (!Number.isFinite(dobMean) || dobMean < 0 || dobMean > 1) {
    throw new RangeError(`degree of belief must be in [0, 1], got ${dobMean}`);
  }
  return 100 * dobMean;
}
