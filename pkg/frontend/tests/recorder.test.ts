import { beforeEach, describe, expect, it } from "vitest";

import {
  EventLog,
  LOG_NODE_ID,
  RECORDER_NAME,
  install,
  readLog,
} from "../src/recorder";

// Shape mirrors the harness's wrapper-heavy style template.
const FORM_BODY = `
<main class="page">
<h1>Form 0000</h1>
<form id="form-0000" action="/submit" method="post">
<div class="field-wrap" id="wrap-email">
  <label for="email">Email</label>
  <input type="email" id="email" name="email" required>
</div>
<div class="field-wrap" id="wrap-plan">
  <fieldset><legend>Plan</legend>
  <label for="plan-0"><input type="radio" id="plan-0" name="plan" value="a" required> A</label>
  <label for="plan-1"><input type="radio" id="plan-1" name="plan" value="b"> B</label>
  </fieldset>
</div>
<div class="field-wrap" id="wrap-country">
  <label>Country</label>
  <select name="country"><option value="">-- Select --</option>
    <option value="us">US</option><option value="fr">FR</option></select>
</div>
<input type="hidden" name="token" value="1">
<div class="actions"><button type="submit" id="form-0000-submit">Send</button></div>
</form>
</main>`;

function setBody(html: string): void {
  document.body.innerHTML = html;
}

function log(): EventLog {
  const parsed = readLog(document);
  if (!parsed) throw new Error("recorder log missing");
  return parsed;
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("install", () => {
  it("creates the reserved hidden log node with an empty event list", () => {
    setBody(FORM_BODY);
    install(document, window);
    const node = document.getElementById(LOG_NODE_ID);
    expect(node).not.toBeNull();
    expect(node!.style.display).toBe("none");
    expect(log().events).toEqual([]);
    expect(log().header).toEqual({
      recorder: RECORDER_NAME,
      version: 1,
      malformed: false,
    });
  });

  it("leaves the original DOM unchanged apart from the log node", () => {
    setBody(FORM_BODY);
    const before = document.body.innerHTML;
    install(document, window);
    document.getElementById(LOG_NODE_ID)!.remove();
    expect(document.body.innerHTML).toBe(before);
  });

  it("does not mutate any control attribute", () => {
    setBody(FORM_BODY);
    const snapshot = Array.from(
      document.querySelectorAll("input, select, textarea, button"),
    ).map((el) => el.outerHTML);
    install(document, window);
    const after = Array.from(
      document.querySelectorAll("input, select, textarea, button"),
    ).map((el) => el.outerHTML);
    expect(after).toEqual(snapshot);
  });

  it("is idempotent", () => {
    setBody(FORM_BODY);
    install(document, window);
    install(document, window);
    expect(document.querySelectorAll(`#${LOG_NODE_ID}`).length).toBe(1);
    const input = document.getElementById("email")!;
    input.dispatchEvent(new Event("input", { bubbles: true }));
    // one listener set, so exactly one event recorded
    expect(log().events.length).toBe(1);
  });

  it("flags pages without exactly one form as malformed", () => {
    setBody("<p>no form here</p>");
    install(document, window);
    expect(log().header.malformed).toBe(true);
  });
});

describe("event capture", () => {
  beforeEach(() => {
    setBody(FORM_BODY);
    install(document, window);
  });

  it("records input and change events with the field name, in form", () => {
    const input = document.getElementById("email")!;
    input.dispatchEvent(new Event("input", { bubbles: true }));
    input.dispatchEvent(new Event("change", { bubbles: true }));
    const events = log().events;
    expect(events.length).toBe(2);
    for (const ev of events) {
      expect(ev.target_descriptor.name).toBe("email");
      expect(ev.target_descriptor.tag).toBe("input");
      expect(ev.target_descriptor.in_form).toBe(true);
    }
    expect(events.map((e) => e.event_kind)).toEqual(["input", "change"]);
  });

  it("records clicks on wrapper divs with tag div, in form", () => {
    const wrapper = document.getElementById("wrap-email")!;
    wrapper.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    const events = log().events;
    expect(events.length).toBe(1);
    expect(events[0].event_kind).toBe("click");
    expect(events[0].target_descriptor.tag).toBe("div");
    expect(events[0].target_descriptor.id).toBe("wrap-email");
    expect(events[0].target_descriptor.in_form).toBe(true);
  });

  it("marks out-of-form targets with in_form false", () => {
    const heading = document.querySelector("h1")!;
    heading.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(log().events[0].target_descriptor.in_form).toBe(false);
  });

  it("keeps timestamps non-decreasing and order stable", () => {
    const input = document.getElementById("email")!;
    const select = document.querySelector("select")!;
    for (let i = 0; i < 5; i += 1) {
      input.dispatchEvent(new Event("input", { bubbles: true }));
      select.dispatchEvent(new Event("change", { bubbles: true }));
    }
    const stamps = log().events.map((e) => e.timestamp_ms);
    for (let i = 1; i < stamps.length; i += 1) {
      expect(stamps[i]).toBeGreaterThanOrEqual(stamps[i - 1]);
    }
    expect(log().events.length).toBe(10);
  });

  it("records nothing for untouched fields, including hidden ones", () => {
    const input = document.getElementById("email")!;
    input.dispatchEvent(new Event("input", { bubbles: true }));
    const names = log().events.map((e) => e.target_descriptor.name);
    expect(names).not.toContain("token");
    expect(names).not.toContain("plan");
    expect(names).not.toContain("country");
  });
});

describe("readLog", () => {
  it("is idempotent with no interim interaction", () => {
    setBody(FORM_BODY);
    install(document, window);
    document
      .getElementById("email")!
      .dispatchEvent(new Event("input", { bubbles: true }));
    const first = JSON.stringify(readLog(document));
    const second = JSON.stringify(readLog(document));
    expect(second).toBe(first);
  });

  it("returns null when the recorder is absent", () => {
    setBody(FORM_BODY);
    expect(readLog(document)).toBeNull();
  });
});
