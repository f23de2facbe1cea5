/**
 * Wire types and body builders for the collection server's HTTP API.
 * These mirror the schemas the server enforces; golden fixtures produced by
 * the server's own test suite pin the exact shapes.
 */

export type ImpactStatus = "patient" | "carer" | "no";
export type RegionCode = "au" | "ca" | "uk" | "us" | "other";
export type AgeBand = "18-29" | "30-39" | "40-49" | "50-59" | "60-69" | "69+";
export type Gender = "female" | "male" | "other" | "not_said";
export type UsageFrequency = "daily_gt2" | "daily_le2" | "weekly" | "monthly";
export type ClientKind = "donor" | "baseline";

export interface SurveyAnswers {
  pd_status: ImpactStatus;
  ms_status: ImpactStatus;
  db_status: ImpactStatus;
  researcher: "yes" | "no";
  residence: RegionCode;
  age_band: AgeBand;
  gender: Gender;
  device_use: UsageFrequency;
  search_use: UsageFrequency;
  paid_or_inquired_sct: "yes" | "no";
  city?: string;
  city_not_said?: boolean;
}

export interface RegisterBody {
  survey: SurveyAnswers;
  consent: boolean;
  client_kind: ClientKind;
  plugin_version: string;
  ui_language: string;
}

export interface RegisterResponse {
  participant_id: string;
  study_id: number;
  terms: string[];
}

export interface AdRecord {
  name: string;
  title: string;
  url: string;
  content: string;
  resolved_host: string;
}

export interface OrganicResult {
  title: string;
  content: string;
  url: string;
  position: number;
}

export interface TopStory {
  title: string;
  author: string;
  url: string;
  position: number;
}

export interface SerpSnapshot {
  query: string;
  tld: string;
  fetched_at: string; // ISO 8601 with offset
  blocked: boolean;
  raw_page: string | null;
  error: string | null;
  ads: AdRecord[];
  results: OrganicResult[];
  top_stories: TopStory[];
}

export interface SubmissionBody {
  submission_id: string;
  participant_id: string;
  study_id: number;
  plugin_version: string;
  sent_at: string;
  tz_offset_minutes: number;
  ui_language: string;
  order_seed: number | null;
  snapshots: SerpSnapshot[];
}

export function buildRegisterBody(
  survey: SurveyAnswers,
  consent: boolean,
  clientKind: ClientKind,
  pluginVersion: string,
  uiLanguage: string,
): RegisterBody {
  return {
    survey,
    consent,
    client_kind: clientKind,
    plugin_version: pluginVersion,
    ui_language: uiLanguage,
  };
}

export interface SubmissionParts {
  submissionId: string;
  participantId: string;
  studyId: number;
  pluginVersion: string;
  sentAt: string;
  tzOffsetMinutes: number;
  uiLanguage: string;
  orderSeed: number | null;
  snapshots: SerpSnapshot[];
}

export function buildSubmissionBody(parts: SubmissionParts): SubmissionBody {
  if (parts.snapshots.length === 0) {
    throw new Error("a submission needs at least one snapshot");
  }
  if (Math.abs(parts.tzOffsetMinutes) > 14 * 60) {
    throw new Error("tz offset out of range");
  }
  return {
    submission_id: parts.submissionId,
    participant_id: parts.participantId,
    study_id: parts.studyId,
    plugin_version: parts.pluginVersion,
    sent_at: parts.sentAt,
    tz_offset_minutes: parts.tzOffsetMinutes,
    ui_language: parts.uiLanguage,
    order_seed: parts.orderSeed,
    snapshots: parts.snapshots,
  };
}

/** 128-bit lowercase-hex identifier, matching the platform's id format. */
export function newOpaqueId(randomBytes: (n: number) => Uint8Array): string {
  const bytes = randomBytes(16);
  return Array.from(bytes, (b) => b.toString(16).padStart(2, "0")).join("");
}

const TLD_OF_REGION: Record<RegionCode, string> = {
  au: "com.au",
  ca: "ca",
  uk: "co.uk",
  us: "com",
  other: "com",
};

export function tldOfRegion(region: RegionCode): string {
  return TLD_OF_REGION[region];
}

/** Search URL with '+' for spaces in the query component. */
export function buildSearchUrl(tld: string, term: string): string {
  if (!term.trim()) {
    throw new Error("search term must be nonempty");
  }
  const encoded = encodeURIComponent(term).replace(/%20/g, "+");
  return `https://www.google.${tld}/search?q=${encoded}`;
}
