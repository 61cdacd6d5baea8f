// Display formatting only; all quantities arrive precomputed from the API.

export function pct(fraction: number, digits = 2): string {
  return `${(fraction * 100).toFixed(digits)}%`;
}

export function amount(value: number): string {
  return value.toLocaleString("en-US", { maximumFractionDigits: 0 });
}

export function ratio(value: number, digits = 4): string {
  return value.toFixed(digits);
}
