/** Task view state machine: selections, submit gating, error recovery. */

import type { Task } from "./api.js";

export type Status = "idle" | "submitting" | "error";

export interface TaskView {
  task: Task;
  player: string | null;
  sentiment: string | null;
  status: Status;
  error: string | null;
}

export type Action =
  | { kind: "select-player"; player: string }
  | { kind: "select-sentiment"; sentiment: string }
  | { kind: "submit-start" }
  | { kind: "submit-failure"; error: string }
  | { kind: "submit-success" };

export function newView(task: Task): TaskView {
  return { task, player: null, sentiment: null, status: "idle", error: null };
}

export function canSubmit(view: TaskView): boolean {
  return view.player !== null && view.sentiment !== null && view.status !== "submitting";
}

export function reduce(view: TaskView, action: Action): TaskView {
  switch (action.kind) {
    case "select-player":
      if (!view.task.player_options.includes(action.player)) return view;
      return { ...view, player: action.player };
    case "select-sentiment":
      if (!view.task.sentiment_options.includes(action.sentiment)) return view;
      return { ...view, sentiment: action.sentiment };
    case "submit-start":
      if (!canSubmit(view)) return view;
      return { ...view, status: "submitting", error: null };
    case "submit-failure":
      // selections survive a failed submit so nothing is retyped on retry
      return { ...view, status: "error", error: action.error };
    case "submit-success":
      return { ...view, status: "idle", error: null };
  }
}
