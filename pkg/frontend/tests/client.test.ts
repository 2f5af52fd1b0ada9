import { describe, expect, it } from "vitest";

import { ApiError, FetchLike, HarmonyClient } from "../src/client.js";

function fakeFetch(
  handler: (url: string, init?: RequestInit) => { status: number; body?: unknown },
): FetchLike {
  return async (url, init) => {
    const { status, body } = handler(url, init);
    return new Response(body === undefined ? null : JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
}

describe("HarmonyClient", () => {
  it("creates a session with the requested size and mode", async () => {
    let seen: { url: string; body: unknown } | null = null;
    const client = new HarmonyClient(
      "http://x",
      fakeFetch((url, init) => {
        seen = { url, body: JSON.parse(String(init?.body)) };
        return { status: 200, body: { id: "abc" } };
      }),
    );
    expect(await client.createSession(3)).toBe("abc");
    expect(seen!.url).toBe("http://x/sessions");
    expect(seen!.body).toMatchObject({ n: 3, mode: "interactive" });
  });

  it("maps a 204 query response to null", async () => {
    const client = new HarmonyClient("", fakeFetch(() => ({ status: 204 })));
    expect(await client.getQuery("abc")).toBeNull();
  });

  it("returns the pending query when one is waiting", async () => {
    const query = {
      agent: 2,
      prices: { rationals: ["1/2", "1/2"], decimals: ["0.500000", "0.500000"] },
    };
    const client = new HarmonyClient(
      "",
      fakeFetch(() => ({ status: 200, body: query })),
    );
    expect(await client.getQuery("abc")).toEqual(query);
  });

  it("raises ApiError with the server detail and status", async () => {
    const client = new HarmonyClient(
      "",
      fakeFetch(() => ({ status: 409, body: { detail: "stale answer" } })),
    );
    const err = await client.answer("abc", 1, 2).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.message).toBe("stale answer");
  });

  it("treats a missing result as null, not an error", async () => {
    const client = new HarmonyClient(
      "",
      fakeFetch(() => ({ status: 404, body: { detail: "result pending" } })),
    );
    expect(await client.getResult("abc")).toBeNull();
  });

  it("submits tied answers as a room list", async () => {
    let body: unknown = null;
    const client = new HarmonyClient(
      "",
      fakeFetch((_, init) => {
        body = JSON.parse(String(init?.body));
        return { status: 200, body: { status: "ok", state: "awaiting_answer" } };
      }),
    );
    await client.answer("abc", 1, [1, 3]);
    expect(body).toEqual({ agent: 1, room: [1, 3] });
  });
});
