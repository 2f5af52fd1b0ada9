import { describe, expect, it } from "vitest";

import { rankRooms, shiftPrices } from "../src/whatif.js";

describe("shiftPrices", () => {
  it("keeps the total at 1 after a shift", () => {
    const shifted = shiftPrices([0.2, 0.3, 0.5], 1, 0.1);
    expect(shifted[1]).toBeCloseTo(0.4, 12);
    expect(shifted.reduce((a, b) => a + b, 0)).toBeCloseTo(1, 12);
  });

  it("rebalances the other rooms proportionally", () => {
    const shifted = shiftPrices([0.2, 0.4, 0.4], 0, 0.1);
    expect(shifted[1]).toBeCloseTo(shifted[2], 12);
  });

  it("clamps to the [0, 1] range", () => {
    const shifted = shiftPrices([0.2, 0.8], 0, -1);
    expect(shifted[0]).toBe(0);
    expect(shifted[1]).toBeCloseTo(1, 12);
  });
});

describe("rankRooms", () => {
  it("sorts cheapest first with room index as tiebreak", () => {
    expect(rankRooms([0.5, 0.2, 0.3]).map((r) => r.room)).toEqual([2, 3, 1]);
    expect(rankRooms([0.5, 0.5]).map((r) => r.room)).toEqual([1, 2]);
  });
});
