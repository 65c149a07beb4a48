/** Keyboard shortcuts: 1-4 select sentiments, w/b select players. */

import type { Task } from "./api.js";
import type { Action } from "./state.js";

export function actionForKey(key: string, task: Task): Action | null {
  if (key === "w" || key === "W") {
    return { kind: "select-player", player: "White" };
  }
  if (key === "b" || key === "B") {
    return { kind: "select-player", player: "Black" };
  }
  if (/^[1-4]$/.test(key)) {
    const sentiment = task.sentiment_options[Number(key) - 1];
    if (sentiment !== undefined) {
      return { kind: "select-sentiment", sentiment };
    }
  }
  return null;
}
