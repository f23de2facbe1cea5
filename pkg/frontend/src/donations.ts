/**
 * Transparency view: the most recent donations, newest first, so donors can
 * see exactly what left their browser.
 */

import { SubmissionBody } from "./wire.js";

export interface DonationRow {
  query: string;
  time: string; // the snapshot's fetch time, ISO 8601
  adCount: number;
  resultCount: number;
}

export interface LocalStore {
  listSubmissions(): Promise<SubmissionBody[]>;
  appendSubmission(submission: SubmissionBody): Promise<void>;
}

export class MemoryStore implements LocalStore {
  private submissions: SubmissionBody[] = [];

  async listSubmissions(): Promise<SubmissionBody[]> {
    return [...this.submissions];
  }

  async appendSubmission(submission: SubmissionBody): Promise<void> {
    this.submissions.push(submission);
  }
}

/** Snapshot rows of the last `n` submissions, newest submission first. */
export async function listRecentDonations(
  store: LocalStore,
  n: number,
): Promise<DonationRow[]> {
  if (n <= 0) {
    return [];
  }
  const submissions = await store.listSubmissions();
  const newestFirst = [...submissions].sort((a, b) =>
    b.sent_at.localeCompare(a.sent_at),
  );
  const rows: DonationRow[] = [];
  for (const submission of newestFirst.slice(0, n)) {
    for (const snapshot of submission.snapshots) {
      rows.push({
        query: snapshot.query,
        time: snapshot.fetched_at,
        adCount: snapshot.ads.length,
        resultCount: snapshot.results.length,
      });
    }
  }
  return rows;
}
