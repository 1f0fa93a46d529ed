/** Pure projections of the server state into view-model values.
 *
 * Everything here is presentation: loadings, badge placement, and highlight
 * classes are read directly off the payload — no margins, cuts, or flows are
 * computed client-side. */

import type { EventPayload, SpecialAsset, StatePayload } from "./types.js";

export type BranchClass = "outaged" | "special" | "kcrit" | "normal";

/** Relative loading in [0, 1] used for stroke width; null for dead branches. */
export function branchLoading(
  flowMw: number | null,
  ratingMw: number,
): number | null {
  if (flowMw === null || ratingMw <= 0) return null;
  const ratio = Math.abs(flowMw) / ratingMw;
  return Math.min(ratio, 1);
}

export function specialByBranch(
  state: StatePayload,
): Map<string, SpecialAsset> {
  return new Map(state.special_assets.map((s) => [s.branch, s]));
}

/** Branches that belong to some special asset's critical cut (excluding the
 * special assets themselves, which get the stronger class). */
export function kcritMembers(state: StatePayload): Set<string> {
  const specials = new Set(state.special_assets.map((s) => s.branch));
  const members = new Set<string>();
  for (const s of state.special_assets) {
    for (const b of s.kcrit) {
      if (!specials.has(b)) members.add(b);
    }
  }
  return members;
}

export function classifyBranch(
  state: StatePayload,
  branchId: string,
): BranchClass {
  const branch = state.branches.find((b) => b.id === branchId);
  if (branch && !branch.in_service) return "outaged";
  if (state.special_assets.some((s) => s.branch === branchId)) return "special";
  if (kcritMembers(state).has(branchId)) return "kcrit";
  return "normal";
}

/** Events that introduced at least one new special asset get a badge. */
export function badgedEventIndices(events: EventPayload[]): number[] {
  const out: number[] = [];
  events.forEach((e, i) => {
    if (e.new_specials.length > 0) out.push(i);
  });
  return out;
}

/** A what-if on a branch carrying nothing is a no-impact preview. */
export function isNoImpact(event: EventPayload): boolean {
  return (
    event.flow_mw === 0 &&
    event.new_specials.length === 0 &&
    event.islanded_buses.length === 0
  );
}

/** Pre-filled remedial amount: the smallest reduction that clears the asset,
 * as reported by the server (|margin|). */
export function suggestedReduction(asset: SpecialAsset): number {
  return Math.abs(asset.margin_mw);
}

export function liveBranchIds(state: StatePayload): string[] {
  return state.branches.filter((b) => b.in_service).map((b) => b.id);
}

export function formatMw(value: number | null): string {
  if (value === null) return "—";
  const rounded = Math.round(value * 100) / 100;
  return `${rounded} MW`;
}
