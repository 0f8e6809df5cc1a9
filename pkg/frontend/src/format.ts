/** Display formatting: service numbers at four significant figures. */

export function formatSig4(value: number | null | undefined): string {
  if (value === null || value === undefined || !Number.isFinite(value)) {
    return "–"; // en dash for "not available"
  }
  const text = value.toPrecision(4);
  // toPrecision may switch to exponential for very small/large magnitudes;
  // radians in this domain stay well inside plain notation
  return text.includes("e") ? Number(text).toString() : text;
}

export function formatPercent(p: number): string {
  return `${(100 * p).toFixed(1)}%`;
}
