/**
 * Toolbar badge: an attention mark until registration completes, the clean
 * project symbol afterwards. Clicks route to onboarding or to the recent
 * donations view accordingly.
 */

import { OnboardingState, rank } from "./onboarding.js";

export type BadgeState = "attention_needed" | "participating";

export function updateBadge(state: OnboardingState): BadgeState {
  return rank(state) < rank("registered") ? "attention_needed" : "participating";
}

export type ClickTarget = "onboarding" | "recent_donations";

export function clickTarget(badge: BadgeState): ClickTarget {
  return badge === "attention_needed" ? "onboarding" : "recent_donations";
}
