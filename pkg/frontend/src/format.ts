// Display helpers.  Rendered prices always sum to the total rent: each room
// shows a rounded share and the last room absorbs the rounding remainder
// (the screen states this).

export interface DisplayPrice {
  label: string;
  cents: number;
}

export function parseRational(s: string): number {
  const [num, den] = s.split("/");
  return den === undefined ? Number(num) : Number(num) / Number(den);
}

/** Round rationals to cents of the total, remainder on the last room. */
export function displayPrices(
  rationals: string[],
  totalCents = 100,
): DisplayPrice[] {
  const values = rationals.map(parseRational);
  const out: DisplayPrice[] = [];
  let used = 0;
  values.forEach((v, i) => {
    const cents =
      i === values.length - 1
        ? totalCents - used
        : Math.round(v * totalCents);
    used += cents;
    out.push({ label: formatCents(cents, totalCents), cents });
  });
  return out;
}

export function formatCents(cents: number, totalCents: number): string {
  const share = cents / totalCents;
  return `${(share * 100).toFixed(1)}% of rent`;
}

export function sumCents(prices: DisplayPrice[]): number {
  return prices.reduce((acc, p) => acc + p.cents, 0);
}
