/**
 * Crawl schedule mirroring the collector agent: fires at 0, 4, 8, 12, 16 and
 * 20 o'clock local wall time, strictly after "now". A shared vector file
 * generated by the server-side suite pins the behavior of both clients.
 */

export const FIRE_HOURS = [0, 4, 8, 12, 16, 20] as const;

export interface WallClock {
  year: number;
  month: number; // 1-12
  day: number;
  hour: number;
  minute: number;
  second: number;
}

export function wallClockOf(date: Date): WallClock {
  return {
    year: date.getFullYear(),
    month: date.getMonth() + 1,
    day: date.getDate(),
    hour: date.getHours(),
    minute: date.getMinutes(),
    second: date.getSeconds(),
  };
}

function toDate(clock: WallClock): Date {
  return new Date(
    clock.year,
    clock.month - 1,
    clock.day,
    clock.hour,
    clock.minute,
    clock.second,
  );
}

export function nextFireTime(now: WallClock): WallClock {
  const date = toDate({ ...now });
  date.setMinutes(0, 0, 0);
  do {
    date.setHours(date.getHours() + 1);
  } while (!FIRE_HOURS.includes(date.getHours() as (typeof FIRE_HOURS)[number]));
  return wallClockOf(date);
}

export function parseLocalIso(text: string): WallClock {
  const match = /^(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})$/.exec(text);
  if (!match) {
    throw new Error(`not a local ISO timestamp: ${text}`);
  }
  const [, y, mo, d, h, mi, s] = match;
  return {
    year: Number(y),
    month: Number(mo),
    day: Number(d),
    hour: Number(h),
    minute: Number(mi),
    second: Number(s),
  };
}

export function formatLocalIso(clock: WallClock): string {
  const pad = (n: number) => String(n).padStart(2, "0");
  return (
    `${clock.year.toString().padStart(4, "0")}-${pad(clock.month)}-${pad(clock.day)}` +
    `T${pad(clock.hour)}:${pad(clock.minute)}:${pad(clock.second)}`
  );
}

/** Minutes until the next fire, for the alarms API. */
export function minutesUntilNextFire(now: Date): number {
  const target = toDate(nextFireTime(wallClockOf(now)));
  return Math.max((target.getTime() - now.getTime()) / 60_000, 0);
}
