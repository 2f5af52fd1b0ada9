// Polling UI for a rental-harmony session.  All state transitions are
// confirmed by the service; the browser only renders what it was told.

import { Certificate, HarmonyClient, PendingQuery, SessionState } from "./client.js";
import { displayPrices, parseRational } from "./format.js";
import { rankRooms, shiftPrices } from "./whatif.js";

export const POLL_INTERVAL_MS = 1000;

export interface ViewModel {
  banner: string | null;
  status: string;
  myTurn: boolean;
  queryAgent: number | null;
  prices: { room: string; text: string; decimal: string }[];
  roomButtons: number[];
  answered: number;
  result: {
    assignment: { agent: number; room: string }[];
    prices: string[];
    envyGaps: number[];
    queries: number;
  } | null;
}

export function buildViewModel(
  state: SessionState | null,
  query: PendingQuery | null,
  myAgent: number,
  netError: string | null,
): ViewModel {
  const vm: ViewModel = {
    banner: netError,
    status: "connecting",
    myTurn: false,
    queryAgent: null,
    prices: [],
    roomButtons: [],
    answered: state ? state.answers.length : 0,
    result: null,
  };
  if (!state) return vm;
  const names = state.room_names;
  if (state.state === "done" && state.result) {
    vm.status = "done";
    vm.result = certificateView(state.result, names);
    return vm;
  }
  if (state.error) {
    vm.status = "failed";
    vm.banner = state.error;
    return vm;
  }
  if (!query) {
    vm.status = "waiting for other housemates";
    return vm;
  }
  vm.queryAgent = query.agent;
  const display = displayPrices(query.prices.rationals);
  vm.prices = query.prices.rationals.map((r, i) => ({
    room: names[i] ?? `room ${i + 1}`,
    text: display[i].label,
    decimal: query.prices.decimals[i],
  }));
  if (query.agent === myAgent) {
    vm.status = "your turn: pick the room you prefer at these prices";
    vm.myTurn = true;
    vm.roomButtons = names.map((_, i) => i + 1);
  } else {
    vm.status = `waiting for housemate ${query.agent}`;
  }
  return vm;
}

function certificateView(cert: Certificate, names: string[]) {
  return {
    assignment: cert.assignment.map((room, i) => ({
      agent: i + 1,
      room: names[room - 1] ?? `room ${room}`,
    })),
    prices: cert.prices_decimal,
    envyGaps: cert.envy_gaps,
    queries: cert.queries,
  };
}

// ---------------------------------------------------------------------------
// DOM layer (skipped entirely under test, where there is no document)

interface Controls {
  statusEl: HTMLElement;
  bannerEl: HTMLElement;
  queryEl: HTMLElement;
  resultEl: HTMLElement;
  whatifEl: HTMLElement;
}

export class App {
  private sessionId = "";
  private myAgent = 1;
  private submitting = false;
  private lastQueryKey = "";
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private client: HarmonyClient,
    private controls: Controls,
  ) {}

  async join(sessionId: string, agent: number): Promise<void> {
    this.sessionId = sessionId;
    this.myAgent = agent;
    await this.poll();
    this.timer = setInterval(() => void this.poll(), POLL_INTERVAL_MS);
  }

  stop(): void {
    if (this.timer) clearInterval(this.timer);
  }

  private async poll(): Promise<void> {
    let state: SessionState | null = null;
    let query: PendingQuery | null = null;
    let netError: string | null = null;
    try {
      state = await this.client.getSession(this.sessionId);
      query = await this.client.getQuery(this.sessionId);
    } catch (e) {
      netError = `network trouble, retrying: ${(e as Error).message}`;
    }
    const key = query ? `${query.agent}:${query.prices.rationals.join(",")}` : "";
    if (key !== this.lastQueryKey) {
      this.submitting = false; // a fresh query re-enables the form
      this.lastQueryKey = key;
    }
    this.render(buildViewModel(state, query, this.myAgent, netError));
  }

  private async choose(room: number): Promise<void> {
    if (this.submitting) return;
    this.submitting = true;
    try {
      await this.client.answer(this.sessionId, this.myAgent, room);
    } catch (e) {
      const status = (e as { status?: number }).status;
      this.controls.bannerEl.textContent =
        status === 409 ? "query changed, re-check the prices" : String(e);
      this.submitting = false;
    }
    await this.poll();
  }

  private render(vm: ViewModel): void {
    const c = this.controls;
    c.statusEl.textContent = vm.status;
    c.bannerEl.textContent = vm.banner ?? "";
    c.bannerEl.style.display = vm.banner ? "block" : "none";
    c.queryEl.innerHTML = "";
    if (vm.prices.length) {
      const list = document.createElement("ul");
      vm.prices.forEach((p) => {
        const li = document.createElement("li");
        li.textContent = `${p.room}: ${p.decimal} (${p.text})`;
        list.appendChild(li);
      });
      c.queryEl.appendChild(list);
      const note = document.createElement("p");
      note.className = "note";
      note.textContent =
        "shares are display-rounded; the last room absorbs the remainder";
      c.queryEl.appendChild(note);
      this.renderWhatIf(vm);
    }
    if (vm.myTurn && !this.submitting) {
      vm.roomButtons.forEach((room, i) => {
        const btn = document.createElement("button");
        btn.textContent = `take ${vm.prices[i]?.room ?? `room ${room}`}`;
        btn.onclick = () => void this.choose(room);
        c.queryEl.appendChild(btn);
      });
    }
    c.resultEl.innerHTML = "";
    if (vm.result) {
      const head = document.createElement("h2");
      head.textContent = "division certificate";
      c.resultEl.appendChild(head);
      vm.result.assignment.forEach((a, i) => {
        const row = document.createElement("div");
        row.textContent =
          `housemate ${a.agent} -> ${a.room} at ${vm.result!.prices[i]} ` +
          `(envy gap ${vm.result!.envyGaps[a.agent - 1]})`;
        c.resultEl.appendChild(row);
      });
      const meta = document.createElement("p");
      meta.textContent = `${vm.result.queries} oracle queries`;
      c.resultEl.appendChild(meta);
    }
  }

  private renderWhatIf(vm: ViewModel): void {
    const c = this.controls;
    c.whatifEl.innerHTML = "";
    const head = document.createElement("h3");
    head.textContent = "what-if explorer (display only, never submitted)";
    c.whatifEl.appendChild(head);
    const base = vm.prices.map((p) => parseRational(p.decimal));
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "-50";
    slider.max = "50";
    slider.value = "0";
    const out = document.createElement("div");
    const update = () => {
      const delta = Number(slider.value) / 100;
      const ranked = rankRooms(shiftPrices(base, 0, delta));
      out.textContent = ranked
        .map((r) => `${vm.prices[r.room - 1]?.room}: ${r.price.toFixed(2)}`)
        .join("  |  ");
    };
    slider.oninput = update;
    update();
    c.whatifEl.appendChild(slider);
    c.whatifEl.appendChild(out);
  }
}

function init(): void {
  const el = (id: string) => document.getElementById(id) as HTMLElement;
  const client = new HarmonyClient("");
  const app = new App(client, {
    statusEl: el("status"),
    bannerEl: el("banner"),
    queryEl: el("query"),
    resultEl: el("result"),
    whatifEl: el("whatif"),
  });
  const form = document.getElementById("join-form") as HTMLFormElement;
  form.onsubmit = (ev) => {
    ev.preventDefault();
    const sid = (el("session-id") as HTMLInputElement).value.trim();
    const agent = Number((el("agent-index") as HTMLInputElement).value);
    form.style.display = "none";
    void app.join(sid, agent);
  };
  const create = document.getElementById("create-btn") as HTMLButtonElement;
  create.onclick = async () => {
    const n = Number((el("create-n") as HTMLInputElement).value || "3");
    const sid = await client.createSession(n);
    (el("session-id") as HTMLInputElement).value = sid;
  };
}

if (typeof document !== "undefined" && document.getElementById("join-form")) {
  init();
}
