// Pure view-state for a tutoring session. The UI never fabricates state:
// transcript, files, and run results always come verbatim from the latest
// server response; this module only tracks them plus the pending flag that
// mirrors the server's one-turn-per-session rule.

import type { ExecutionResult, Transcript, Turn } from "./api.js";

export interface SessionView {
  sessionId: string | null;
  transcript: Turn[];
  files: Record<string, string>;
  lastRun: ExecutionResult | null;
  pending: boolean;
  notice: string | null;
}

export function initialView(): SessionView {
  return {
    sessionId: null,
    transcript: [],
    files: {},
    lastRun: null,
    pending: false,
    notice: null,
  };
}

export function canSend(view: SessionView, draft: string): boolean {
  return view.sessionId !== null && !view.pending && draft.trim().length > 0;
}

export function canRun(view: SessionView): boolean {
  return (
    view.sessionId !== null && !view.pending && Object.keys(view.files).length > 0
  );
}

export function beginPending(view: SessionView): SessionView {
  return { ...view, pending: true, notice: null };
}

export function endPending(view: SessionView): SessionView {
  return { ...view, pending: false };
}

export function applyTranscript(view: SessionView, transcript: Transcript): SessionView {
  return {
    ...view,
    sessionId: transcript.session_id,
    transcript: transcript.turns,
    lastRun: transcript.last_execution,
  };
}

export function applyFileSave(
  view: SessionView,
  filename: string,
  content: string,
): SessionView {
  return { ...view, files: { ...view.files, [filename]: content } };
}

export function applyRunResult(view: SessionView, result: ExecutionResult): SessionView {
  return { ...view, lastRun: result, pending: false };
}

export function applyError(view: SessionView, status: number, detail: string): SessionView {
  const notice = status === 409 ? "tutor is thinking" : `${status}: ${detail}`;
  return { ...view, pending: false, notice };
}

const BADGES: Record<ExecutionResult["status"], string> = {
  OK: "badge-ok",
  WRONG_OUTPUT: "badge-warn",
  COMPILE_ERROR: "badge-error",
  RUNTIME_ERROR: "badge-error",
  TIMEOUT: "badge-warn",
};

export function badgeClass(status: ExecutionResult["status"]): string {
  return BADGES[status];
}
