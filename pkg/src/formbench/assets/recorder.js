"use strict";
(() => {
  // src/recorder.ts
  var LOG_NODE_ID = "__interaction_log__";
  var RECORDER_NAME = "formbench";
  var RECORDER_VERSION = 1;
  var CAPTURED_KINDS = ["input", "change", "focus"];
  function describe(target) {
    const el = target && target.nodeType === 1 ? target : null;
    return {
      tag: el ? el.tagName.toLowerCase() : "",
      id: el && el.id ? el.id : null,
      name: el && el.getAttribute ? el.getAttribute("name") : null,
      in_form: !!(el && el.closest && el.closest("form"))
    };
  }
  function now(win) {
    const perf = win.performance;
    return Math.round(perf && perf.now() || Date.now());
  }
  function install(doc, win) {
    const w = win || doc.defaultView;
    if (doc.getElementById(LOG_NODE_ID)) return;
    const logNode = doc.createElement("pre");
    logNode.id = LOG_NODE_ID;
    logNode.style.display = "none";
    const header = {
      recorder: RECORDER_NAME,
      version: RECORDER_VERSION,
      malformed: doc.getElementsByTagName("form").length !== 1
    };
    const events = [];
    const write = () => {
      logNode.textContent = JSON.stringify({ header, events });
    };
    const record = (kind) => (ev) => {
      if (ev.target === logNode) return;
      events.push({
        timestamp_ms: now(w),
        target_descriptor: describe(ev.target),
        event_kind: kind
      });
      write();
    };
    for (const kind of CAPTURED_KINDS) {
      doc.addEventListener(kind, record(kind), true);
    }
    doc.addEventListener("click", record("click"), true);
    write();
    doc.body.appendChild(logNode);
  }

  // src/inject.ts
  install(document, window);
})();
