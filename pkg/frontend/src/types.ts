/** Wire types mirroring the /api/v1 payloads. The UI never computes any of
 * these values itself; everything is taken verbatim from the service. */

export interface BusPayload {
  id: number;
  gen_mw: number;
  load_mw: number;
}

export interface BranchPayload {
  id: string;
  from_bus: number;
  to_bus: number;
  rating_mw: number;
  in_service: boolean;
  flow_mw: number | null;
  headroom_fw_mw: number | null;
  headroom_rev_mw: number | null;
}

export interface SpecialAsset {
  branch: string;
  margin_mw: number;
  kcrit: string[];
  flow_mw: number;
  reroute_capacity_mw: number;
}

export interface NewSpecial {
  branch: string;
  margin_mw: number;
  kcrit: string[];
}

export type SessionStatus = "nominal" | "saturated" | "islanded";

export interface EventPayload {
  label: string;
  type: string;
  branch: string | null;
  status: SessionStatus;
  flow_mw: number | null;
  rerouted_mw: number | null;
  deficit_mw: number | null;
  islanded_buses: number[];
  island_imbalance_mw: number | null;
  retested: string[];
  new_specials: NewSpecial[];
  specials_after: string[];
  timings_s: { ups: number | null; sa: number | null; ft: number | null; total: number };
}

export interface StatePayload {
  schema_version: number;
  name: string;
  status: SessionStatus;
  seed: number | null;
  head: number;
  buses: BusPayload[];
  branches: BranchPayload[];
  special_assets: SpecialAsset[];
  event_log: EventPayload[];
}

export interface CreateSessionResponse {
  schema_version: number;
  session_id: string;
  head: number;
  state: StatePayload;
}

export interface MutationResponse {
  schema_version: number;
  head: number;
  event: EventPayload | null;
  state: StatePayload;
}

export interface WhatIfResponse {
  schema_version: number;
  head: number;
  event: EventPayload;
}

export interface FixturesResponse {
  schema_version: number;
  fixtures: string[];
  preloaded: string | null;
}
