// Keystroke capture for one password entry.
//
// The page feeds raw keydown/keyup pairs in here; the machine pairs
// them up and hands back press/release milliseconds untouched. No
// smoothing, no re-timing: whatever the clock said is what gets posted.

export interface CaptureEvent {
  key: string;
  press_ms: number;
  release_ms: number;
}

export type FinishResult =
  | { ok: true; events: CaptureEvent[] }
  | { ok: false; reason: string };

// keys that never carry rhythm information on their own
const MODIFIERS = new Set([
  "Shift",
  "Control",
  "Alt",
  "AltGraph",
  "Meta",
  "CapsLock",
  "NumLock",
  "ScrollLock",
  "Fn",
  "Hyper",
  "Super",
  "Symbol",
]);

export function isModifier(key: string): boolean {
  return MODIFIERS.has(key);
}

export class EntryCapture {
  private held = new Map<string, number>(); // key -> press_ms
  private events: CaptureEvent[] = [];
  private discardReason: string | null = null;

  // feed a keydown; repeats of a held key are the keyboard's
  // auto-repeat and collapse into the first press
  keydown(key: string, timeMs: number): void {
    if (this.discardReason !== null) return;
    if (isModifier(key)) return;
    if (this.held.has(key)) return;
    this.held.set(key, Math.round(timeMs));
  }

  keyup(key: string, timeMs: number): void {
    if (this.discardReason !== null) return;
    if (isModifier(key)) return;
    const press = this.held.get(key);
    if (press === undefined) {
      // the press happened before the field had focus; nothing to pair
      return;
    }
    this.held.delete(key);
    const release = Math.round(timeMs);
    if (release <= press) {
      this.discard(`key "${key}" released with no measurable hold time`);
      return;
    }
    this.events.push({ key, press_ms: press, release_ms: release });
  }

  // focus left the field with a key still down: its release will never
  // be seen, so the attempt cannot produce a complete event list
  abandonIfHolding(reason: string): boolean {
    if (this.discardReason === null && this.held.size > 0) {
      this.discard(reason);
      return true;
    }
    return false;
  }

  discard(reason: string): void {
    this.discardReason = reason;
  }

  get holding(): number {
    return this.held.size;
  }

  get count(): number {
    return this.events.length;
  }

  finish(): FinishResult {
    if (this.discardReason !== null) {
      return { ok: false, reason: this.discardReason };
    }
    if (this.held.size > 0) {
      const keys = [...this.held.keys()].join(", ");
      return { ok: false, reason: `unreleased key at submit: ${keys}` };
    }
    if (this.events.length === 0) {
      return { ok: false, reason: "no keystrokes captured" };
    }
    const events = [...this.events].sort((a, b) => a.press_ms - b.press_ms);
    return { ok: true, events };
  }

  reset(): void {
    this.held.clear();
    this.events = [];
    this.discardReason = null;
  }
}
