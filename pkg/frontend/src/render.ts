/** Pure string renderers for each view. They take server payloads plus
 * layout geometry and return markup; the bootstrap assigns the result to the
 * DOM and wires delegated events. Keeping these pure makes the whole UI
 * testable in Node and reconstructible from a single GET of the state. */

import type { Coordinates } from "./layout.js";
import type { EventPayload, SpecialAsset, StatePayload } from "./types.js";
import {
  badgedEventIndices,
  branchLoading,
  classifyBranch,
  formatMw,
  isNoImpact,
  kcritMembers,
  suggestedReduction,
} from "./selectors.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const CLASS_COLOR: Record<string, string> = {
  outaged: "#9ca3af",
  special: "#dc2626",
  kcrit: "#f59e0b",
  normal: "#2563eb",
};

export function renderNetworkView(
  state: StatePayload,
  coords: Coordinates,
  width = 800,
  height = 600,
): string {
  const specials = new Set(state.special_assets.map((s) => s.branch));
  const cutMembers = kcritMembers(state);
  const lines: string[] = [];
  for (const br of state.branches) {
    const a = coords.get(br.from_bus);
    const b = coords.get(br.to_bus);
    if (!a || !b) continue;
    const cls = !br.in_service
      ? "outaged"
      : specials.has(br.id)
        ? "special"
        : cutMembers.has(br.id)
          ? "kcrit"
          : "normal";
    const loading = branchLoading(br.flow_mw, br.rating_mw);
    const strokeWidth = loading === null ? 1 : 1 + 7 * loading;
    const dash = cls === "outaged" ? ' stroke-dasharray="6 4"' : "";
    lines.push(
      `<line data-branch="${escapeHtml(br.id)}" class="branch branch-${cls}" ` +
        `x1="${a.x.toFixed(1)}" y1="${a.y.toFixed(1)}" ` +
        `x2="${b.x.toFixed(1)}" y2="${b.y.toFixed(1)}" ` +
        `stroke="${CLASS_COLOR[cls]}" stroke-width="${strokeWidth.toFixed(2)}"${dash}>` +
        `<title>${escapeHtml(br.id)}: ${formatMw(br.flow_mw)} / ${formatMw(br.rating_mw)}</title>` +
        `</line>`,
    );
  }
  const nodes = state.buses
    .map((bus) => {
      const p = coords.get(bus.id);
      if (!p) return "";
      const role =
        bus.gen_mw > bus.load_mw ? "gen" : bus.load_mw > 0 ? "load" : "junction";
      return (
        `<g class="bus bus-${role}" data-bus="${bus.id}">` +
        `<circle cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="7"></circle>` +
        `<text x="${(p.x + 9).toFixed(1)}" y="${(p.y - 9).toFixed(1)}">${bus.id}</text>` +
        `</g>`
      );
    })
    .join("");
  return (
    `<svg class="network" viewBox="0 0 ${width} ${height}" role="img">` +
    lines.join("") +
    nodes +
    `</svg>`
  );
}

export function renderBranchDetail(
  state: StatePayload,
  branchId: string,
): string {
  const branch = state.branches.find((b) => b.id === branchId);
  if (!branch) return `<p class="error">unknown branch</p>`;
  const special = state.special_assets.find((s) => s.branch === branchId);
  const cls = classifyBranch(state, branchId);
  const rows = [
    `<dt>endpoints</dt><dd>${branch.from_bus} – ${branch.to_bus}</dd>`,
    `<dt>rating</dt><dd>${formatMw(branch.rating_mw)}</dd>`,
    `<dt>flow</dt><dd>${formatMw(branch.flow_mw)}</dd>`,
    `<dt>headroom</dt><dd>${formatMw(branch.headroom_fw_mw)} / ${formatMw(branch.headroom_rev_mw)}</dd>`,
  ];
  if (special) {
    rows.push(
      `<dt>reroute capacity</dt><dd>${formatMw(special.reroute_capacity_mw)}</dd>`,
      `<dt>margin</dt><dd class="margin-negative">${formatMw(special.margin_mw)}</dd>`,
      `<dt>critical cut</dt><dd>${special.kcrit.map(escapeHtml).join(", ")}</dd>`,
    );
  }
  return (
    `<section class="branch-detail" data-class="${cls}">` +
    `<h3>${escapeHtml(branchId)}</h3><dl>${rows.join("")}</dl></section>`
  );
}

export function renderTimeline(events: EventPayload[]): string {
  const badged = new Set(badgedEventIndices(events));
  const items = events
    .map((e, i) => {
      const badge = badged.has(i)
        ? `<span class="badge badge-special">${e.new_specials.length} new special</span>`
        : "";
      const specials = e.new_specials
        .map(
          (s) =>
            `<li class="new-special" data-branch="${escapeHtml(s.branch)}">` +
            `${escapeHtml(s.branch)} margin ${formatMw(s.margin_mw)} ` +
            `cut {${s.kcrit.map(escapeHtml).join(", ")}}</li>`,
        )
        .join("");
      const timing =
        e.timings_s.total !== null
          ? `<span class="timing">${(e.timings_s.total * 1000).toFixed(0)} ms</span>`
          : "";
      return (
        `<li class="event event-${e.type} status-${e.status}" data-index="${i}">` +
        `<span class="label">${escapeHtml(e.label)}</span>${badge}${timing}` +
        (specials ? `<ul>${specials}</ul>` : "") +
        `</li>`
      );
    })
    .join("");
  const undo =
    events.length > 0
      ? `<button class="undo" data-action="undo">undo last event</button>`
      : "";
  return `<ol class="timeline">${items}</ol>${undo}`;
}

export function renderWhatIf(preview: EventPayload): string {
  if (isNoImpact(preview)) {
    return (
      `<section class="what-if no-impact">` +
      `<h3>${escapeHtml(preview.label)}</h3>` +
      `<p>no impact: branch carries no flow</p></section>`
    );
  }
  const specials = preview.new_specials
    .map(
      (s) =>
        `<li data-branch="${escapeHtml(s.branch)}">${escapeHtml(s.branch)} ` +
        `margin ${formatMw(s.margin_mw)} cut {${s.kcrit.map(escapeHtml).join(", ")}}</li>`,
    )
    .join("");
  return (
    `<section class="what-if">` +
    `<h3>${escapeHtml(preview.label)}</h3>` +
    `<dl>` +
    `<dt>status</dt><dd>${preview.status}</dd>` +
    `<dt>flow lost</dt><dd>${formatMw(preview.flow_mw)}</dd>` +
    `<dt>rerouted</dt><dd>${formatMw(preview.rerouted_mw)}</dd>` +
    `<dt>deficit</dt><dd>${formatMw(preview.deficit_mw)}</dd>` +
    `</dl>` +
    (specials
      ? `<h4>would become special</h4><ul class="would-special">${specials}</ul>`
      : `<p>no new special assets</p>`) +
    `</section>`
  );
}

export function renderRemedialDialog(asset: SpecialAsset): string {
  const amount = suggestedReduction(asset);
  const cut = asset.kcrit.map(escapeHtml).join(",");
  return (
    `<form class="remedial" data-cut="${cut}">` +
    `<h3>remedial redispatch for ${escapeHtml(asset.branch)}</h3>` +
    `<p>reduce transfer across {${asset.kcrit.map(escapeHtml).join(", ")}} by at least ` +
    `${formatMw(amount)} to clear the saturation.</p>` +
    `<label>reduction (MW) <input name="reduce_by_mw" type="number" step="0.01" ` +
    `min="0" value="${amount}"></label>` +
    `<button type="submit">apply</button>` +
    `</form>`
  );
}

export function renderStatusBar(state: StatePayload): string {
  const n = state.special_assets.length;
  const badge =
    n > 0
      ? `<span class="badge badge-special">${n} special asset${n === 1 ? "" : "s"}</span>`
      : `<span class="badge badge-clear">no special assets</span>`;
  return (
    `<header class="status status-${state.status}">` +
    `<strong>${escapeHtml(state.name)}</strong> ` +
    `<span class="session-status">${state.status}</span> ${badge} ` +
    `<span class="head">event ${state.head}</span>` +
    `</header>`
  );
}
