/**
 * Linear onboarding state machine. Transitions only move forward along the
 * declared order; events that do not apply to the current state are no-ops
 * (logged, never thrown).
 */

export const ONBOARDING_ORDER = [
  "installed",
  "consent_shown",
  "consent_accepted",
  "survey_submitted",
  "registered",
  "active",
  "offboarded",
] as const;

export type OnboardingState = (typeof ONBOARDING_ORDER)[number];

export type OnboardingEvent =
  | { kind: "consent_viewed" }
  | { kind: "consent_accepted" }
  | { kind: "survey_valid" }
  | {
      kind: "server_ack";
      participantId?: string;
      studyId?: number;
      terms?: string[];
    }
  | { kind: "offboard_update" };

export interface Registration {
  participantId: string;
  studyId: number;
  terms: string[];
}

export interface OnboardingContext {
  state: OnboardingState;
  registration: Registration | null;
}

export function initialOnboarding(): OnboardingContext {
  return { state: "installed", registration: null };
}

export function rank(state: OnboardingState): number {
  return ONBOARDING_ORDER.indexOf(state);
}

export type IgnoredLogger = (state: OnboardingState, event: OnboardingEvent) => void;

/**
 * Apply one event. A registration server ack stores the participant
 * identifiers; a submission server ack marks the profile active; the
 * offboarding flag applies to registered and active profiles.
 */
export function advanceOnboarding(
  context: OnboardingContext,
  event: OnboardingEvent,
  logIgnored: IgnoredLogger = () => undefined,
): OnboardingContext {
  const { state } = context;
  switch (event.kind) {
    case "consent_viewed":
      if (state === "installed") {
        return { ...context, state: "consent_shown" };
      }
      break;
    case "consent_accepted":
      if (state === "consent_shown") {
        return { ...context, state: "consent_accepted" };
      }
      break;
    case "survey_valid":
      if (state === "consent_accepted") {
        return { ...context, state: "survey_submitted" };
      }
      break;
    case "server_ack":
      if (state === "survey_submitted") {
        if (
          event.participantId === undefined ||
          event.studyId === undefined ||
          event.terms === undefined
        ) {
          break; // a registration ack must carry the identifiers
        }
        return {
          state: "registered",
          registration: {
            participantId: event.participantId,
            studyId: event.studyId,
            terms: event.terms,
          },
        };
      }
      if (state === "registered") {
        // First acknowledged submission: the profile is actively donating.
        return { ...context, state: "active" };
      }
      break;
    case "offboard_update":
      if (state === "registered" || state === "active") {
        return { ...context, state: "offboarded" };
      }
      break;
  }
  logIgnored(state, event);
  return context;
}
