import { describe, expect, it } from "vitest";

import type { ExecutionResult, Transcript } from "../src/api.js";
import {
  applyError,
  applyFileSave,
  applyRunResult,
  applyTranscript,
  badgeClass,
  beginPending,
  canRun,
  canSend,
  initialView,
} from "../src/state.js";

const RESULT: ExecutionResult = {
  status: "RUNTIME_ERROR",
  compile_stdout: "",
  compile_stderr: "",
  run_stdout: "",
  run_stderr: "IndexError",
  exit_code: 1,
  wall_ms: 12,
  truncated: false,
};

function openView() {
  return { ...initialView(), sessionId: "s1" };
}

describe("send/run gating", () => {
  it("disables send with empty input", () => {
    expect(canSend(openView(), "")).toBe(false);
    expect(canSend(openView(), "   ")).toBe(false);
    expect(canSend(openView(), "help")).toBe(true);
  });

  it("pending disables both send and run", () => {
    const view = beginPending(applyFileSave(openView(), "main.py", "print(1)"));
    expect(view.pending).toBe(true);
    expect(canSend(view, "help")).toBe(false);
    expect(canRun(view)).toBe(false);
  });

  it("run requires at least one file", () => {
    expect(canRun(openView())).toBe(false);
    expect(canRun(applyFileSave(openView(), "main.py", "x"))).toBe(true);
  });

  it("no session means nothing is enabled", () => {
    expect(canSend(initialView(), "hi")).toBe(false);
    expect(canRun(initialView())).toBe(false);
  });
});

describe("server state mirroring", () => {
  it("transcript and last run come verbatim from the server response", () => {
    const transcript: Transcript = {
      session_id: "s1",
      turns: [
        { index: 0, role: "STUDENT", text: "q", at: "t0" },
        { index: 1, role: "TUTOR", text: "a", at: "t1" },
      ],
      last_execution: RESULT,
      events: [],
    };
    const view = applyTranscript(openView(), transcript);
    expect(view.transcript).toEqual(transcript.turns);
    expect(view.lastRun).toEqual(RESULT);
  });

  it("run result replaces the badge source and clears pending", () => {
    const view = applyRunResult(beginPending(openView()), RESULT);
    expect(view.lastRun?.status).toBe("RUNTIME_ERROR");
    expect(view.pending).toBe(false);
  });
});

describe("error notices", () => {
  it("409 renders the in-flight notice", () => {
    const view = applyError(beginPending(openView()), 409, "SESSION_BUSY");
    expect(view.notice).toBe("tutor is thinking");
    expect(view.pending).toBe(false);
  });

  it("other statuses surface status and detail", () => {
    const view = applyError(openView(), 502, "no llm configured");
    expect(view.notice).toBe("502: no llm configured");
  });
});

describe("badges", () => {
  it("maps each status to a badge class", () => {
    expect(badgeClass("OK")).toBe("badge-ok");
    expect(badgeClass("WRONG_OUTPUT")).toBe("badge-warn");
    expect(badgeClass("COMPILE_ERROR")).toBe("badge-error");
    expect(badgeClass("RUNTIME_ERROR")).toBe("badge-error");
    expect(badgeClass("TIMEOUT")).toBe("badge-warn");
  });
});
