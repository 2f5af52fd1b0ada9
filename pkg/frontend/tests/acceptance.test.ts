// End-to-end: three scripted housemates drive an interactive session through
// the HTTP API only.  The certificate the browser client receives must be
// identical to what the library computes directly from the same answer log,
// and a double-submitted answer must be logged exactly once.

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { HarmonyClient } from "../src/client.js";
import { parseRational } from "../src/format.js";

const PORT = 21000 + (process.pid % 20000);
const BASE = `http://127.0.0.1:${PORT}`;

const LAUNCHER = `
import sys
import uvicorn
from coverdeg.service import create_app
uvicorn.run(create_app(sys.argv[1]), host="127.0.0.1", port=int(sys.argv[2]),
            log_level="warning")
`;

const REPLAY = `
import json
import sys
from coverdeg.harmony import SessionStore
session = SessionStore(sys.argv[1]).get(sys.argv[2])
print(json.dumps(session.result.to_json(), sort_keys=True))
`;

let dataDir: string;
let server: ChildProcess;

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const res = await fetch(`${BASE}/sessions/nope`);
      if (res.status === 404) return;
    } catch {
      /* not up yet */
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error("service did not start");
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "harmony-ui-"));
  server = spawn("python3", ["-c", LAUNCHER, dataDir, String(PORT)], {
    stdio: ["ignore", "inherit", "inherit"],
  });
  await waitForServer();
}, 30000);

afterAll(() => {
  server.kill();
  rmSync(dataDir, { recursive: true, force: true });
});

// Each simulated human wants their own room: answer the cheapest free room
// they value most, otherwise the room maximising value minus price.
const UTILITIES = [
  [1, 0, 0],
  [0, 1, 0],
  [0, 0, 1],
];

function humanAnswer(agent: number, rationals: string[]): number[] {
  const x = rationals.map(parseRational);
  const u = UTILITIES[agent - 1];
  const free = x.map((v, j) => j).filter((j) => x[j] <= 1e-9);
  if (free.length) {
    const top = Math.max(...free.map((j) => u[j]));
    return free.filter((j) => u[j] >= top - 1e-12).map((j) => j + 1);
  }
  const scores = u.map((v, j) => v - x[j]);
  const top = Math.max(...scores);
  return scores
    .map((s, j) => (s >= top - 1e-12 ? j + 1 : 0))
    .filter((r) => r > 0);
}

describe("scripted three-housemate session", () => {
  it("matches the direct library solve on the same answer log", async () => {
    const client = new HarmonyClient(BASE);
    const sid = await client.createSession(3);

    let doubleSubmitted = false;
    let doubleKey = "";
    for (let round = 0; round < 4000; round++) {
      const state = await client.getSession(sid);
      if (state.state === "done") break;
      expect(state.error).toBeNull();
      const query = await client.getQuery(sid);
      if (!query) {
        await new Promise((r) => setTimeout(r, 20));
        continue;
      }
      const rooms = humanAnswer(query.agent, query.prices.rationals);
      const first = await client.answer(sid, query.agent, rooms);
      expect(first.status).toBe("ok");
      if (!doubleSubmitted) {
        // impatient housemate presses the button twice; the repeat is only
        // recognisable as such once the solver has moved on to someone else
        const next = await client.getQuery(sid);
        if (!next || next.agent !== query.agent) {
          const again = await client.answer(sid, query.agent, rooms);
          expect(again.status).toBe("duplicate");
          doubleSubmitted = true;
          doubleKey = JSON.stringify([query.agent, query.prices.rationals]);
        }
      }
    }

    const finalState = await client.getSession(sid);
    expect(finalState.state).toBe("done");
    const httpCert = await client.getResult(sid);
    expect(httpCert).not.toBeNull();
    expect(httpCert!.assignment.slice().sort()).toEqual([1, 2, 3]);
    const total = httpCert!.prices
      .map(parseRational)
      .reduce((a, b) => a + b, 0);
    expect(total).toBeCloseTo(1, 9);

    // direct library solve from the very same answer log
    const replayed = JSON.parse(
      execFileSync("python3", ["-c", REPLAY, dataDir, sid], {
        encoding: "utf8",
      }),
    );
    expect(httpCert).toEqual(replayed);

    // the double-submitted answer appears exactly once in the log
    const events = readFileSync(join(dataDir, `${sid}.jsonl`), "utf8")
      .trim()
      .split("\n")
      .map((line) => JSON.parse(line));
    const answers = events.filter((e) => e.event === "answer");
    expect(doubleSubmitted).toBe(true);
    const hits = answers.filter(
      (e) => JSON.stringify([e.agent, e.prices]) === doubleKey,
    );
    expect(hits).toHaveLength(1);
    expect(answers).toHaveLength(finalState.answers.length);
  }, 120000);
});
