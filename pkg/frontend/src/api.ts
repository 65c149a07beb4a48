/** Typed client for the workbench JSON API. */

export interface Task {
  task_id: string;
  record_id: string;
  text: string;
  predicate_span: [number, number];
  predicate_lemma: string;
  board_fen: string | null;
  assigned_annotator: string;
  common: boolean;
  player_options: string[];
  sentiment_options: string[];
}

export interface Submission {
  task_id: string;
  annotator_id: string;
  player: string;
  sentiment: string;
}

export interface SubmitResult {
  ok: boolean;
  task_id: string;
  replaced: boolean;
}

export interface Progress {
  annotator: string;
  answered: number;
  remaining: number;
  kappa: number | null;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (typeof body.detail === "string") detail = body.detail;
    } catch {
      /* non-JSON error body; keep the status text */
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  /** Next task for the annotator, or null when the queue is exhausted. */
  async nextTask(annotator: string): Promise<Task | null> {
    const url = `${this.base}/api/task?annotator=${encodeURIComponent(annotator)}`;
    const body = await asJson<Task | { done: true }>(await fetch(url));
    return "done" in body ? null : body;
  }

  async submit(submission: Submission): Promise<SubmitResult> {
    const response = await fetch(`${this.base}/api/submit`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(submission),
    });
    return asJson<SubmitResult>(response);
  }

  async progress(annotator: string): Promise<Progress> {
    const url = `${this.base}/api/progress?annotator=${encodeURIComponent(annotator)}`;
    return asJson<Progress>(await fetch(url));
  }
}
