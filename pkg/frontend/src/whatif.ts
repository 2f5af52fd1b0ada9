// What-if explorer: purely client-side, non-binding.  Given the current
// prices and a hypothetical shift of one room's price (the rest rebalanced
// proportionally), re-sort the rooms for display.  Nothing here is ever
// sent to the service.

export interface WhatIfRow {
  room: number;
  price: number;
}

/** Shift room `index` by `delta` (clamped to [0,1]) and rebalance the other
 * rooms proportionally so the total stays 1. */
export function shiftPrices(
  prices: number[],
  index: number,
  delta: number,
): number[] {
  const target = Math.min(1, Math.max(0, prices[index] + delta));
  const othersTotal = 1 - prices[index];
  const newOthersTotal = 1 - target;
  return prices.map((p, i) => {
    if (i === index) return target;
    if (othersTotal <= 0) return newOthersTotal / (prices.length - 1);
    return (p / othersTotal) * newOthersTotal;
  });
}

/** Rooms sorted cheapest-first under the hypothetical prices. */
export function rankRooms(prices: number[]): WhatIfRow[] {
  return prices
    .map((price, i) => ({ room: i + 1, price }))
    .sort((a, b) => a.price - b.price || a.room - b.room);
}
