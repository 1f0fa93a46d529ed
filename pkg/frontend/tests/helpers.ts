import type {
  BranchPayload,
  BusPayload,
  EventPayload,
  SpecialAsset,
  StatePayload,
} from "../src/types.js";

export function bus(id: number, gen = 0, load = 0): BusPayload {
  return { id, gen_mw: gen, load_mw: load };
}

export function branch(
  id: string,
  from: number,
  to: number,
  overrides: Partial<BranchPayload> = {},
): BranchPayload {
  return {
    id,
    from_bus: from,
    to_bus: to,
    rating_mw: 100,
    in_service: true,
    flow_mw: 0,
    headroom_fw_mw: 100,
    headroom_rev_mw: 100,
    ...overrides,
  };
}

export function special(
  branchId: string,
  marginMw: number,
  kcrit: string[],
): SpecialAsset {
  return {
    branch: branchId,
    margin_mw: marginMw,
    kcrit,
    flow_mw: 50,
    reroute_capacity_mw: 50 + marginMw,
  };
}

export function event(
  label: string,
  overrides: Partial<EventPayload> = {},
): EventPayload {
  return {
    label,
    type: "outage",
    branch: null,
    status: "nominal",
    flow_mw: 10,
    rerouted_mw: 10,
    deficit_mw: 0,
    islanded_buses: [],
    island_imbalance_mw: null,
    retested: [],
    new_specials: [],
    specials_after: [],
    timings_s: { ups: 0.001, sa: 0.001, ft: 0.002, total: 0.004 },
    ...overrides,
  };
}

export function makeState(overrides: Partial<StatePayload> = {}): StatePayload {
  return {
    schema_version: 1,
    name: "test-net",
    status: "nominal",
    seed: null,
    head: 0,
    buses: [bus(1, 30, 0), bus(2, 0, 30), bus(3)],
    branches: [
      branch("1-2", 1, 2, { flow_mw: 20 }),
      branch("1-3", 1, 3, { flow_mw: 10 }),
      branch("3-2", 3, 2, { flow_mw: 10 }),
    ],
    special_assets: [],
    event_log: [],
    ...overrides,
  };
}

export function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
