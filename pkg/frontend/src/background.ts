/**
 * Background orchestration. The browser surface is injected so the logic is
 * testable outside a real extension runtime; crawling only ever happens in
 * tabs this controller opens itself, on the configured search domains.
 */

import { clickTarget, updateBadge } from "./badge.js";
import { listRecentDonations, LocalStore } from "./donations.js";
import {
  advanceOnboarding,
  initialOnboarding,
  OnboardingContext,
  OnboardingEvent,
} from "./onboarding.js";
import { minutesUntilNextFire } from "./schedule.js";
import {
  buildSearchUrl,
  buildSubmissionBody,
  newOpaqueId,
  RegionCode,
  RegisterBody,
  RegisterResponse,
  SerpSnapshot,
  SubmissionBody,
  tldOfRegion,
} from "./wire.js";

export const CRAWL_ALARM = "crawl-cycle";
export const STARTUP_DELAY_MINUTES = 0.5;

export interface BrowserSurface {
  createAlarm(name: string, delayInMinutes: number): void;
  setBadge(text: string): void;
  /** Opens a background tab, returns the extracted snapshot for its page. */
  crawlInBackgroundTab(url: string, term: string, tld: string): Promise<SerpSnapshot>;
  openPage(page: "onboarding" | "recent_donations"): void;
  now(): Date;
  randomBytes(n: number): Uint8Array;
}

export interface ServerApi {
  register(body: RegisterBody): Promise<RegisterResponse>;
  submit(body: SubmissionBody): Promise<boolean>;
}

export interface ControllerConfig {
  region: RegionCode;
  pluginVersion: string;
  uiLanguage: string;
}

export class BackgroundController {
  onboarding: OnboardingContext = initialOnboarding();
  private cycleInFlight = false;

  constructor(
    private readonly browser: BrowserSurface,
    private readonly api: ServerApi,
    private readonly store: LocalStore,
    private readonly config: ControllerConfig,
  ) {}

  dispatch(event: OnboardingEvent): void {
    this.onboarding = advanceOnboarding(this.onboarding, event);
    this.refreshBadge();
  }

  refreshBadge(): void {
    this.browser.setBadge(updateBadge(this.onboarding.state) === "attention_needed" ? "!" : "");
  }

  async handleBadgeClick(): Promise<void> {
    this.browser.openPage(clickTarget(updateBadge(this.onboarding.state)));
  }

  async register(body: RegisterBody): Promise<void> {
    const response = await this.api.register(body);
    this.dispatch({
      kind: "server_ack",
      participantId: response.participant_id,
      studyId: response.study_id,
      terms: response.terms,
    });
  }

  /** Schedule the startup crawl and the recurring wall-clock alarm. */
  onBrowserStartup(): void {
    this.browser.createAlarm(CRAWL_ALARM, STARTUP_DELAY_MINUTES);
  }

  scheduleNextFire(): void {
    this.browser.createAlarm(CRAWL_ALARM, minutesUntilNextFire(this.browser.now()));
  }

  shuffledTerms(): string[] {
    const registration = this.onboarding.registration;
    if (!registration) {
      return [];
    }
    const terms = [...registration.terms];
    for (let i = terms.length - 1; i > 0; i--) {
      const bytes = this.browser.randomBytes(4);
      const value =
        (((bytes[0] ?? 0) << 24) | ((bytes[1] ?? 0) << 16) | ((bytes[2] ?? 0) << 8) | (bytes[3] ?? 0)) >>> 0;
      const j = value % (i + 1);
      const a = terms[i] as string;
      terms[i] = terms[j] as string;
      terms[j] = a;
    }
    return terms;
  }

  async runCycle(): Promise<SubmissionBody | null> {
    const registration = this.onboarding.registration;
    if (!registration || this.cycleInFlight) {
      return null;
    }
    if (this.onboarding.state === "offboarded") {
      return null;
    }
    this.cycleInFlight = true;
    try {
      const tld = tldOfRegion(this.config.region);
      const snapshots: SerpSnapshot[] = [];
      for (const term of this.shuffledTerms()) {
        const url = buildSearchUrl(tld, term);
        snapshots.push(await this.browser.crawlInBackgroundTab(url, term, tld));
      }
      if (snapshots.length === 0) {
        return null;
      }
      const now = this.browser.now();
      const submission = buildSubmissionBody({
        submissionId: newOpaqueId((n) => this.browser.randomBytes(n)),
        participantId: registration.participantId,
        studyId: registration.studyId,
        pluginVersion: this.config.pluginVersion,
        sentAt: now.toISOString(),
        tzOffsetMinutes: -now.getTimezoneOffset(),
        uiLanguage: this.config.uiLanguage,
        orderSeed: null,
        snapshots,
      });
      await this.store.appendSubmission(submission);
      const acked = await this.api.submit(submission);
      if (acked) {
        this.dispatch({ kind: "server_ack" });
      }
      return submission;
    } finally {
      this.cycleInFlight = false;
      this.scheduleNextFire();
    }
  }

  async recentDonations(n: number) {
    return listRecentDonations(this.store, n);
  }
}
