import { EntryCapture } from "./capture.js";
import { ApiError, enrollEntry, health, verifyEntry } from "./api.js";

// Served from the kda service itself (kda serve --static frontend),
// so the API lives on the same origin. ?api=http://host:port overrides
// that for development against a separately running service.
const API_BASE = new URLSearchParams(location.search).get("api") ?? "";

const accountInput = document.getElementById("account") as HTMLInputElement;
const passwordInput = document.getElementById("password") as HTMLInputElement;
const modeInputs = document.querySelectorAll<HTMLInputElement>('input[name="mode"]');
const statusLine = document.getElementById("status") as HTMLElement;
const attemptLog = document.getElementById("log") as HTMLUListElement;

const capture = new EntryCapture();
let submitWhenReleased = false;
let busy = false;

const now = () => Math.round(performance.now());

function mode(): string {
  for (const input of modeInputs) if (input.checked) return input.value;
  return "enroll";
}

function setStatus(text: string, tone: "info" | "ok" | "bad" = "info"): void {
  statusLine.textContent = text;
  statusLine.dataset.tone = tone;
}

function logAttempt(text: string, tone: "ok" | "bad"): void {
  const item = document.createElement("li");
  item.textContent = text;
  item.dataset.tone = tone;
  attemptLog.prepend(item);
}

function resetEntry(): void {
  capture.reset();
  submitWhenReleased = false;
  passwordInput.value = "";
}

async function submitEntry(): Promise<void> {
  const result = capture.finish();
  if (!result.ok) {
    setStatus(`attempt discarded: ${result.reason}. Type the password again.`, "bad");
    resetEntry();
    return;
  }
  const account = accountInput.value.trim();
  if (account === "") {
    setStatus("enter an account id first", "bad");
    resetEntry();
    return;
  }

  busy = true;
  try {
    if (mode() === "enroll") {
      const r = await enrollEntry(API_BASE, account, result.events);
      if (r.status === "enrolled") {
        setStatus(`${r.account_id} enrolled (${r.samples_so_far} entries). Switch to verify and try your rhythm.`, "ok");
      } else {
        setStatus(`entry ${r.samples_so_far} of ${r.samples_needed} recorded; type the password again`, "info");
      }
    } else {
      const r = await verifyEntry(API_BASE, account, result.events);
      const verdict = r.accepted ? "accepted" : "rejected";
      setStatus(`${verdict} (score ${r.score.toFixed(6)}, threshold ${r.threshold.toFixed(6)})`, r.accepted ? "ok" : "bad");
      logAttempt(`${new Date().toLocaleTimeString()} ${r.account_id}: ${verdict}, score ${r.score.toFixed(6)}`, r.accepted ? "ok" : "bad");
    }
  } catch (err) {
    if (err instanceof ApiError) {
      setStatus(err.status === 0 ? err.message : `service says: ${err.message}`, "bad");
    } else {
      setStatus(`unexpected error: ${String(err)}`, "bad");
    }
  } finally {
    busy = false;
    resetEntry();
  }
}

passwordInput.addEventListener("keydown", (e) => {
  if (busy) {
    e.preventDefault();
    return;
  }
  if (e.key === "Enter") {
    e.preventDefault();
    // let overlapping keys finish releasing before we close the entry
    if (capture.holding > 0) {
      submitWhenReleased = true;
    } else {
      void submitEntry();
    }
    return;
  }
  capture.keydown(e.key, now());
});

passwordInput.addEventListener("keyup", (e) => {
  if (e.key === "Enter") return;
  capture.keyup(e.key, now());
  if (submitWhenReleased && capture.holding === 0) {
    submitWhenReleased = false;
    void submitEntry();
  }
});

passwordInput.addEventListener("blur", () => {
  if (capture.abandonIfHolding("focus left the field mid-press")) {
    setStatus("attempt discarded: focus left the field mid-press. Type the password again.", "bad");
    resetEntry();
  }
});

for (const input of modeInputs) {
  input.addEventListener("change", () => {
    resetEntry();
    setStatus(mode() === "enroll" ? "type the password and press Enter; 4 entries train the model" : "type the password and press Enter to verify");
    passwordInput.focus();
  });
}

void (async () => {
  try {
    const h = await health(API_BASE);
    setStatus(`service up, ${h.accounts} account(s) enrolled. Type the password and press Enter.`);
  } catch (err) {
    setStatus(err instanceof ApiError ? err.message : String(err), "bad");
  }
})();
