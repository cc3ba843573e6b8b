// Thin typed client for the REST API. No business logic lives here: every
// method is one endpoint call and the response is returned as-is.

export interface Turn {
  index: number;
  role: "STUDENT" | "TUTOR";
  text: string;
  at: string;
}

export interface ExecutionResult {
  status: "OK" | "WRONG_OUTPUT" | "COMPILE_ERROR" | "RUNTIME_ERROR" | "TIMEOUT";
  compile_stdout: string;
  compile_stderr: string;
  run_stdout: string;
  run_stderr: string;
  exit_code: number | null;
  wall_ms: number;
  truncated: boolean;
}

export interface Course {
  course_id: string;
  title: string;
  instructor_id: string;
  roster: string[];
}

export interface Assignment {
  assignment_id: string;
  course_id: string;
  title: string;
  created_at: string;
  expected_output: string | null;
}

export interface MaterialSummary {
  material_id: string;
  kind: string;
  filename: string;
  chunks_created?: number;
}

export interface Transcript {
  session_id: string;
  turns: Turn[];
  last_execution: ExecutionResult | null;
  events: TutorEvent[];
}

export interface TutorEvent {
  event_id: string;
  session_id: string;
  turn_index: number;
  query_text: string;
  retrieved_chunk_ids: string[];
  prompt_chars: number;
  response_chars: number;
  at: string;
}

export interface EventPage {
  events: TutorEvent[];
  next_cursor: number | null;
  total: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    detail: string,
  ) {
    super(detail);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = "HTTP_ERROR";
  let detail = `HTTP ${response.status}`;
  try {
    const body = await response.json();
    if (body && typeof body.error === "string") code = body.error;
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep defaults
  }
  return new ApiError(response.status, code, detail);
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    public token: string = "",
  ) {}

  private headers(json: boolean): Record<string, string> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    if (json) headers["Content-Type"] = "application/json";
    return headers;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: this.headers(body !== undefined),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  me(): Promise<{ principal: string; role: "INSTRUCTOR" | "STUDENT" }> {
    return this.request("GET", "/api/me");
  }

  listCourses(): Promise<{ courses: Course[] }> {
    return this.request("GET", "/api/courses");
  }

  createCourse(title: string): Promise<Course> {
    return this.request("POST", "/api/courses", { title });
  }

  addToRoster(courseId: string, studentId: string): Promise<Course> {
    return this.request("POST", `/api/courses/${courseId}/roster`, {
      student_id: studentId,
    });
  }

  listAssignments(courseId: string): Promise<{ assignments: Assignment[] }> {
    return this.request("GET", `/api/courses/${courseId}/assignments`);
  }

  createAssignment(
    courseId: string,
    title: string,
    expectedOutput: string | null,
  ): Promise<Assignment> {
    return this.request("POST", `/api/courses/${courseId}/assignments`, {
      title,
      expected_output: expectedOutput,
    });
  }

  async uploadMaterial(
    assignmentId: string,
    kind: string,
    file: File,
  ): Promise<MaterialSummary> {
    const form = new FormData();
    form.append("kind", kind);
    form.append("file", file);
    const response = await fetch(
      `${this.baseUrl}/api/assignments/${assignmentId}/materials`,
      { method: "POST", headers: this.headers(false), body: form },
    );
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as MaterialSummary;
  }

  startSession(assignmentId: string): Promise<{ session_id: string }> {
    return this.request("POST", `/api/assignments/${assignmentId}/sessions`);
  }

  putFile(sessionId: string, filename: string, content: string): Promise<unknown> {
    return this.request("POST", `/api/sessions/${sessionId}/files`, {
      filename,
      content,
    });
  }

  sendMessage(sessionId: string, text: string): Promise<Turn> {
    return this.request("POST", `/api/sessions/${sessionId}/messages`, { text });
  }

  run(sessionId: string, entrypoint?: string): Promise<ExecutionResult> {
    return this.request("POST", `/api/sessions/${sessionId}/run`, {
      entrypoint: entrypoint ?? null,
    });
  }

  transcript(sessionId: string): Promise<Transcript> {
    return this.request("GET", `/api/sessions/${sessionId}/transcript`);
  }

  events(assignmentId: string, cursor = 0, limit = 20): Promise<EventPage> {
    return this.request(
      "GET",
      `/api/assignments/${assignmentId}/events?cursor=${cursor}&limit=${limit}`,
    );
  }
}
