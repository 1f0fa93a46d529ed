/** Browser bootstrap: wires the pure renderers to the DOM and the API client.
 *
 * Every mutation round-trips through the service before anything re-renders;
 * the whole view is rebuilt from the latest server state, so a refresh (or a
 * dropped response) can always recover by fetching state again. */

import { ApiClient, ApiError } from "./api.js";
import { forceLayout, type Coordinates } from "./layout.js";
import {
  renderBranchDetail,
  renderNetworkView,
  renderRemedialDialog,
  renderStatusBar,
  renderTimeline,
  renderWhatIf,
} from "./render.js";
import type { StatePayload } from "./types.js";

interface AppState {
  sessionId: string | null;
  state: StatePayload | null;
  coords: Coordinates | null;
  selectedBranch: string | null;
}

const app: AppState = {
  sessionId: null,
  state: null,
  coords: null,
  selectedBranch: null,
};

const api = new ApiClient();

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function showError(message: string): void {
  el("errors").textContent = message;
}

function renderAll(): void {
  const state = app.state;
  if (!state || !app.coords) return;
  el("status-bar").innerHTML = renderStatusBar(state);
  el("network").innerHTML = renderNetworkView(state, app.coords);
  el("timeline").innerHTML = renderTimeline(state.event_log);
  el("detail").innerHTML = app.selectedBranch
    ? renderBranchDetail(state, app.selectedBranch)
    : "<p>select a branch</p>";
  const asset = state.special_assets.find(
    (s) => s.branch === app.selectedBranch,
  );
  el("remedial").innerHTML = asset ? renderRemedialDialog(asset) : "";
}

function adopt(state: StatePayload): void {
  app.state = state;
  // recompute the layout only when the topology identity changes
  if (!app.coords) {
    app.coords = forceLayout(state, { seed: 42 });
  }
  renderAll();
}

async function refresh(): Promise<void> {
  if (!app.sessionId) return;
  adopt(await api.getState(app.sessionId));
}

async function guard(action: () => Promise<void>): Promise<void> {
  showError("");
  try {
    await action();
  } catch (err) {
    if (err instanceof ApiError) {
      showError(err.detail);
      if (err.status === 409) await refresh().catch(() => undefined);
    } else {
      showError(String(err));
    }
  }
}

async function startSession(fixture: string): Promise<void> {
  const created = await api.createSession({ fixture });
  app.sessionId = created.session_id;
  app.coords = null;
  app.selectedBranch = null;
  adopt(created.state);
}

function wire(): void {
  el("network").addEventListener("click", (ev) => {
    const target = (ev.target as Element).closest("[data-branch]");
    if (!target) return;
    app.selectedBranch = target.getAttribute("data-branch");
    renderAll();
  });

  el("apply-outage").addEventListener("click", () =>
    guard(async () => {
      if (!app.sessionId || !app.selectedBranch) return;
      const resp = await api.applyOutage(app.sessionId, app.selectedBranch);
      adopt(resp.state);
    }),
  );

  el("what-if").addEventListener("click", () =>
    guard(async () => {
      if (!app.sessionId || !app.selectedBranch) return;
      const resp = await api.whatIf(app.sessionId, app.selectedBranch);
      el("what-if-panel").innerHTML = renderWhatIf(resp.event);
    }),
  );

  el("timeline").addEventListener("click", (ev) => {
    const target = ev.target as Element;
    if (target.matches('[data-action="undo"]')) {
      void guard(async () => {
        if (!app.sessionId) return;
        const resp = await api.undo(app.sessionId);
        adopt(resp.state);
      });
    }
  });

  el("remedial").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const form = ev.target as HTMLFormElement;
    const cut = (form.getAttribute("data-cut") ?? "").split(",").filter(Boolean);
    const amount = Number(
      (form.elements.namedItem("reduce_by_mw") as HTMLInputElement).value,
    );
    void guard(async () => {
      if (!app.sessionId) return;
      const resp = await api.remedial(app.sessionId, cut, amount);
      adopt(resp.state);
    });
  });

  el("fixture-select").addEventListener("change", (ev) => {
    const fixture = (ev.target as HTMLSelectElement).value;
    if (fixture) void guard(() => startSession(fixture));
  });
}

async function init(): Promise<void> {
  wire();
  await guard(async () => {
    const fixtures = await api.listFixtures();
    const select = el("fixture-select") as HTMLSelectElement;
    select.innerHTML =
      `<option value="">choose a network…</option>` +
      fixtures.fixtures
        .map((f) => `<option value="${f}">${f}</option>`)
        .join("");
    const initial = fixtures.preloaded ?? "ieee118";
    if (fixtures.fixtures.includes(initial) || fixtures.preloaded) {
      select.value = fixtures.fixtures.includes(initial) ? initial : "";
      await startSession(initial);
    }
  });
}

void init();
