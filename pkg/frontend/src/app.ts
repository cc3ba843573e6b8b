// DOM wiring for the single-page UI. All state shown to the user comes from
// server responses (see state.ts); this file only renders and forwards
// actions to the REST client.

import { ApiClient, ApiError, Assignment, Course, EventPage } from "./api.js";
import { pollWhile } from "./poll.js";
import {
  SessionView,
  applyError,
  applyFileSave,
  applyRunResult,
  applyTranscript,
  badgeClass,
  beginPending,
  canRun,
  canSend,
  endPending,
  initialView,
} from "./state.js";

const MATERIAL_KINDS = ["INSTRUCTIONS", "SOLUTION", "LECTURE", "REMARKS"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function notice(parent: HTMLElement, text: string, kind: "info" | "error" = "info"): void {
  const box = el("div", { class: `notice notice-${kind}` }, text);
  parent.prepend(box);
  setTimeout(() => box.remove(), 6000);
}

// ---------------------------------------------------------------------------
// student panel

class StudentPanel {
  private view: SessionView = initialView();
  private draft = "";
  private currentFile = "";
  private root: HTMLElement;
  private sendButton!: HTMLButtonElement;
  private runButton!: HTMLButtonElement;
  private chatLog!: HTMLElement;
  private resultBox!: HTMLElement;
  private noticeBox!: HTMLElement;
  private editor!: HTMLTextAreaElement;
  private fileSelect!: HTMLSelectElement;

  constructor(private api: ApiClient, mount: HTMLElement) {
    this.root = el("div", { class: "panel" });
    mount.append(this.root);
    void this.renderPicker();
  }

  private async renderPicker(): Promise<void> {
    this.root.replaceChildren(el("h2", {}, "Your courses"));
    const { courses } = await this.api.listCourses();
    if (courses.length === 0) {
      this.root.append(el("p", { class: "empty" }, "You are not enrolled in any course yet."));
      return;
    }
    for (const course of courses) {
      const block = el("div", { class: "card" }, el("h3", {}, course.title));
      const { assignments } = await this.api.listAssignments(course.course_id);
      if (assignments.length === 0) {
        block.append(el("p", { class: "empty" }, "No assignments yet."));
      }
      for (const assignment of assignments) {
        const button = el("button", {}, `Open: ${assignment.title}`);
        button.addEventListener("click", () => void this.openAssignment(assignment));
        block.append(button);
      }
      this.root.append(block);
    }
  }

  private async openAssignment(assignment: Assignment): Promise<void> {
    const { session_id } = await this.api.startSession(assignment.assignment_id);
    this.view = { ...initialView(), sessionId: session_id };
    this.renderWorkspace(assignment);
    await this.refreshTranscript();
  }

  private renderWorkspace(assignment: Assignment): void {
    this.root.replaceChildren(
      el("h2", {}, assignment.title),
      (this.noticeBox = el("div", { class: "notices" })),
    );

    // editor column
    const editorCard = el("div", { class: "card" }, el("h3", {}, "Code"));
    const nameInput = el("input", { placeholder: "filename, e.g. main.py" });
    this.fileSelect = el("select", {});
    this.fileSelect.addEventListener("change", () => {
      this.currentFile = this.fileSelect.value;
      this.editor.value = this.view.files[this.currentFile] ?? "";
    });
    this.editor = el("textarea", { rows: "14", spellcheck: "false" });
    const saveButton = el("button", {}, "Save file");
    saveButton.addEventListener("click", () => {
      const filename = this.currentFile || nameInput.value.trim();
      if (!filename) return;
      void this.saveFile(filename, this.editor.value);
    });
    const newButton = el("button", {}, "New file");
    newButton.addEventListener("click", () => {
      const filename = nameInput.value.trim();
      if (!filename) return;
      this.currentFile = filename;
      this.editor.value = "";
      this.syncControls();
    });
    this.runButton = el("button", { class: "run" }, "Run");
    this.runButton.addEventListener("click", () => void this.runCode());
    this.resultBox = el("div", { class: "result" });
    editorCard.append(
      el("div", { class: "row" }, this.fileSelect, nameInput, newButton),
      this.editor,
      el("div", { class: "row" }, saveButton, this.runButton),
      this.resultBox,
    );

    // chat column
    const chatCard = el("div", { class: "card" }, el("h3", {}, "Tutor"));
    this.chatLog = el("div", { class: "chat-log" });
    const messageInput = el("textarea", { rows: "2", placeholder: "Ask the tutor..." });
    messageInput.addEventListener("input", () => {
      this.draft = messageInput.value;
      this.syncControls();
    });
    this.sendButton = el("button", { class: "send" }, "Send");
    this.sendButton.addEventListener("click", () => {
      const text = this.draft;
      messageInput.value = "";
      this.draft = "";
      void this.sendMessage(text);
    });
    chatCard.append(this.chatLog, el("div", { class: "row" }, messageInput, this.sendButton));

    this.root.append(el("div", { class: "columns" }, editorCard, chatCard));
    this.syncControls();
  }

  private syncControls(): void {
    this.sendButton.disabled = !canSend(this.view, this.draft);
    this.runButton.disabled = !canRun(this.view);
    if (this.view.notice) {
      notice(this.noticeBox, this.view.notice, "info");
      this.view = { ...this.view, notice: null };
    }
    this.renderFiles();
    this.renderChat();
    this.renderResult();
  }

  private renderFiles(): void {
    const names = Object.keys(this.view.files).sort();
    this.fileSelect.replaceChildren(
      ...names.map((name) => el("option", { value: name }, name)),
    );
    if (this.currentFile && names.includes(this.currentFile)) {
      this.fileSelect.value = this.currentFile;
    }
  }

  private renderChat(): void {
    this.chatLog.replaceChildren(
      ...this.view.transcript.map((turn) =>
        el("div", { class: `turn turn-${turn.role.toLowerCase()}` },
          el("span", { class: "who" }, turn.role === "STUDENT" ? "You" : "Tutor"),
          el("p", {}, turn.text),
        ),
      ),
    );
    if (this.view.pending) {
      this.chatLog.append(el("div", { class: "turn turn-pending" }, "tutor is thinking..."));
    }
    this.chatLog.scrollTop = this.chatLog.scrollHeight;
  }

  private renderResult(): void {
    const result = this.view.lastRun;
    if (!result) {
      this.resultBox.replaceChildren();
      return;
    }
    const streams = el(
      "details",
      {},
      el("summary", {}, "raw output"),
      el("pre", {}, `exit_code: ${result.exit_code}\nwall_ms: ${result.wall_ms}\n` +
        `truncated: ${result.truncated}\n\n--- compile stdout ---\n${result.compile_stdout}` +
        `\n--- compile stderr ---\n${result.compile_stderr}` +
        `\n--- run stdout ---\n${result.run_stdout}\n--- run stderr ---\n${result.run_stderr}`),
    );
    this.resultBox.replaceChildren(
      el("span", { class: `badge ${badgeClass(result.status)}` }, result.status),
      streams,
    );
  }

  private async refreshTranscript(): Promise<void> {
    if (!this.view.sessionId) return;
    const transcript = await this.api.transcript(this.view.sessionId);
    this.view = applyTranscript(this.view, transcript);
    this.syncControls();
  }

  private async saveFile(filename: string, content: string): Promise<void> {
    if (!this.view.sessionId) return;
    try {
      await this.api.putFile(this.view.sessionId, filename, content);
      this.view = applyFileSave(this.view, filename, content);
      this.currentFile = filename;
      notice(this.noticeBox, `saved ${filename}`);
    } catch (error) {
      this.handleError(error);
    }
    this.syncControls();
  }

  private startPolling(): void {
    pollWhile(async () => {
      await this.refreshTranscript();
      return this.view.pending;
    });
  }

  private async sendMessage(text: string): Promise<void> {
    const sessionId = this.view.sessionId;
    if (!sessionId) return;
    this.view = beginPending(this.view);
    this.syncControls();
    this.startPolling();
    try {
      await this.api.sendMessage(sessionId, text);
      this.view = endPending(this.view);
      await this.refreshTranscript();
    } catch (error) {
      this.handleError(error);
    }
    this.syncControls();
  }

  private async runCode(): Promise<void> {
    const sessionId = this.view.sessionId;
    if (!sessionId) return;
    this.view = beginPending(this.view);
    this.syncControls();
    try {
      const result = await this.api.run(sessionId);
      this.view = applyRunResult(this.view, result);
    } catch (error) {
      this.handleError(error);
    }
    this.syncControls();
  }

  private handleError(error: unknown): void {
    if (error instanceof ApiError) {
      this.view = applyError(this.view, error.status, error.message);
    } else {
      this.view = applyError(this.view, 0, String(error));
    }
  }
}

// ---------------------------------------------------------------------------
// instructor panel

class InstructorPanel {
  private root: HTMLElement;
  private coursesBox!: HTMLElement;
  private noticeBox!: HTMLElement;

  constructor(private api: ApiClient, mount: HTMLElement) {
    this.root = el("div", { class: "panel" });
    mount.append(this.root);
    this.render();
    void this.refreshCourses();
  }

  private render(): void {
    this.noticeBox = el("div", { class: "notices" });
    const titleInput = el("input", { placeholder: "course title" });
    const createButton = el("button", {}, "Create course");
    createButton.addEventListener("click", async () => {
      if (!titleInput.value.trim()) return;
      try {
        await this.api.createCourse(titleInput.value.trim());
        titleInput.value = "";
        await this.refreshCourses();
      } catch (error) {
        notice(this.noticeBox, String(error), "error");
      }
    });
    this.coursesBox = el("div", {});
    this.root.replaceChildren(
      el("h2", {}, "Instructor dashboard"),
      this.noticeBox,
      el("div", { class: "row" }, titleInput, createButton),
      this.coursesBox,
    );
  }

  private async refreshCourses(): Promise<void> {
    const { courses } = await this.api.listCourses();
    this.coursesBox.replaceChildren();
    for (const course of courses) {
      this.coursesBox.append(await this.courseCard(course));
    }
    if (courses.length === 0) {
      this.coursesBox.append(el("p", { class: "empty" }, "No courses yet."));
    }
  }

  private async courseCard(course: Course): Promise<HTMLElement> {
    const card = el("div", { class: "card" }, el("h3", {}, course.title),
      el("p", { class: "muted" }, `${course.roster.length} enrolled`));

    const studentInput = el("input", { placeholder: "student id" });
    const rosterButton = el("button", {}, "Add to roster");
    rosterButton.addEventListener("click", async () => {
      try {
        await this.api.addToRoster(course.course_id, studentInput.value.trim());
        studentInput.value = "";
        notice(this.noticeBox, "student added");
      } catch (error) {
        notice(this.noticeBox, String(error), "error");
      }
    });
    card.append(el("div", { class: "row" }, studentInput, rosterButton));

    const assignmentInput = el("input", { placeholder: "assignment title" });
    const expectedInput = el("textarea", { rows: "2", placeholder: "expected output (optional)" });
    const assignmentButton = el("button", {}, "Create assignment");
    assignmentButton.addEventListener("click", async () => {
      if (!assignmentInput.value.trim()) return;
      try {
        await this.api.createAssignment(
          course.course_id,
          assignmentInput.value.trim(),
          expectedInput.value ? expectedInput.value : null,
        );
        assignmentInput.value = "";
        expectedInput.value = "";
        await this.refreshCourses();
      } catch (error) {
        notice(this.noticeBox, String(error), "error");
      }
    });
    card.append(el("div", { class: "row" }, assignmentInput, assignmentButton), expectedInput);

    const { assignments } = await this.api.listAssignments(course.course_id);
    for (const assignment of assignments) {
      card.append(this.assignmentBlock(assignment));
    }
    return card;
  }

  private assignmentBlock(assignment: Assignment): HTMLElement {
    const block = el("div", { class: "assignment" }, el("h4", {}, assignment.title));

    // upload form: the kind select is closed over the four categories
    const kindSelect = el("select", {});
    kindSelect.append(...MATERIAL_KINDS.map((k) => el("option", { value: k }, k)));
    const fileInput = el("input", { type: "file" });
    const uploadButton = el("button", {}, "Upload material");
    uploadButton.addEventListener("click", async () => {
      const file = fileInput.files?.[0];
      if (!file) return;
      try {
        const material = await this.api.uploadMaterial(
          assignment.assignment_id, kindSelect.value, file);
        notice(this.noticeBox,
          `uploaded ${material.filename}: ${material.chunks_created} chunks created`);
      } catch (error) {
        if (error instanceof ApiError) {
          notice(this.noticeBox, `${error.status}: ${error.message}`, "error");
        } else {
          notice(this.noticeBox, String(error), "error");
        }
      }
    });
    block.append(el("div", { class: "row" }, kindSelect, fileInput, uploadButton));

    // event browser
    const eventsBox = el("div", { class: "events" });
    const moreButton = el("button", {}, "Load events");
    let cursor: number | null = 0;
    moreButton.addEventListener("click", async () => {
      if (cursor === null) return;
      const page: EventPage = await this.api.events(assignment.assignment_id, cursor);
      if (page.events.length === 0 && cursor === 0) {
        eventsBox.replaceChildren(el("p", { class: "empty" }, "No tutoring events yet."));
      }
      for (const event of page.events) {
        eventsBox.append(
          el("div", { class: "event" },
            el("code", {}, `turn ${event.turn_index}`),
            ` ${event.query_text} `,
            el("span", { class: "muted" },
              `(${event.retrieved_chunk_ids.length} chunks, ${event.response_chars} reply chars)`),
          ),
        );
      }
      cursor = page.next_cursor;
      moreButton.textContent = cursor === null ? "All events loaded" : "Load more events";
      moreButton.disabled = cursor === null;
    });
    block.append(moreButton, eventsBox);
    return block;
  }
}

// ---------------------------------------------------------------------------
// bootstrapping

export function initApp(mount: HTMLElement): void {
  const tokenInput = el("input", { placeholder: "paste your bearer token", size: "48" });
  const enterButton = el("button", {}, "Sign in");
  const loginBox = el("div", { class: "card login" },
    el("h2", {}, "leaftutor"), el("div", { class: "row" }, tokenInput, enterButton));
  mount.append(loginBox);

  enterButton.addEventListener("click", async () => {
    const api = new ApiClient("", tokenInput.value.trim());
    try {
      const who = await api.me();
      loginBox.remove();
      if (who.role === "INSTRUCTOR") new InstructorPanel(api, mount);
      else new StudentPanel(api, mount);
    } catch (error) {
      notice(loginBox, error instanceof ApiError ? `${error.status}: ${error.message}` : String(error), "error");
    }
  });
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  initApp(document.getElementById("app") as HTMLElement);
}
