/* In-page interaction recorder.
 *
 * Captures input, change, focus, and click events in the capture phase and
 * exposes the ordered log as JSON in a reserved hidden DOM node, so a
 * WebDriver client can read it back with a plain property fetch. Clicks are
 * captured at the document root on purpose: mis-bound clicks on non-control
 * elements (styling wrappers and the like) must show up in the log too.
 */

/** Reserved node id; shared contract with the evaluation harness. */
export const LOG_NODE_ID = "__interaction_log__";

export const RECORDER_NAME = "formbench";

export const RECORDER_VERSION = 1;

export interface TargetDescriptor {
  tag: string;
  id: string | null;
  name: string | null;
  in_form: boolean;
}

export interface RecordedEvent {
  timestamp_ms: number;
  target_descriptor: TargetDescriptor;
  event_kind: string;
}

export interface EventLog {
  header: {
    recorder: string;
    version: number;
    malformed: boolean;
  };
  events: RecordedEvent[];
}

const CAPTURED_KINDS = ["input", "change", "focus"] as const;

function describe(target: EventTarget | null): TargetDescriptor {
  const el =
    target && (target as Node).nodeType === 1 ? (target as Element) : null;
  return {
    tag: el ? el.tagName.toLowerCase() : "",
    id: el && el.id ? el.id : null,
    name: el && el.getAttribute ? el.getAttribute("name") : null,
    in_form: !!(el && el.closest && el.closest("form")),
  };
}

function now(win: Window): number {
  const perf = win.performance;
  return Math.round((perf && perf.now()) || Date.now());
}

/**
 * Attach the recorder to a document. Idempotent: a second call on the same
 * document is a no-op. Never throws on malformed pages; a page without
 * exactly one form is flagged in the log header instead.
 */
export function install(doc: Document, win?: Window): void {
  const w = win || (doc.defaultView as Window);
  if (doc.getElementById(LOG_NODE_ID)) return;

  const logNode = doc.createElement("pre");
  logNode.id = LOG_NODE_ID;
  logNode.style.display = "none";
  const header = {
    recorder: RECORDER_NAME,
    version: RECORDER_VERSION,
    malformed: doc.getElementsByTagName("form").length !== 1,
  };
  const events: RecordedEvent[] = [];

  const write = (): void => {
    logNode.textContent = JSON.stringify({ header, events });
  };

  const record =
    (kind: string) =>
    (ev: Event): void => {
      if (ev.target === logNode) return;
      events.push({
        timestamp_ms: now(w),
        target_descriptor: describe(ev.target),
        event_kind: kind,
      });
      write();
    };

  for (const kind of CAPTURED_KINDS) {
    doc.addEventListener(kind, record(kind), true);
  }
  // clicks are captured at the document root so wrapper elements show up
  doc.addEventListener("click", record("click"), true);

  write();
  doc.body.appendChild(logNode);
}

/** Parse the current log out of an instrumented document. */
export function readLog(doc: Document): EventLog | null {
  const node = doc.getElementById(LOG_NODE_ID);
  if (!node || !node.textContent) return null;
  try {
    return JSON.parse(node.textContent) as EventLog;
  } catch {
    return null;
  }
}
