/** DOM wiring for the single-task annotation page. */

import { ApiClient, type Task } from "./api.js";
import { boardOrPlaceholder, type Board } from "./board.js";
import { segmentSentence } from "./sentence.js";
import { actionForKey } from "./shortcuts.js";
import { canSubmit, newView, reduce, type Action, type TaskView } from "./state.js";

const client = new ApiClient();

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderBoard(board: Board | null): HTMLElement {
  if (board === null) {
    return el("div", "board-placeholder", "no board available");
  }
  const wrap = el("div", "board-wrap");
  const grid = el("div", "board");
  board.ranks.forEach((rank, r) => {
    rank.forEach((piece, f) => {
      const cell = el("div", (r + f) % 2 === 0 ? "square light" : "square dark");
      if (piece) cell.textContent = piece.glyph;
      grid.appendChild(cell);
    });
  });
  wrap.appendChild(grid);
  wrap.appendChild(el("div", "side-to-move", `${board.sideToMove} to move`));
  return wrap;
}

function renderSentence(task: Task): HTMLElement {
  const container = el("p", "sentence");
  try {
    const { before, verb, after } = segmentSentence(task.text, task.predicate_span);
    container.appendChild(document.createTextNode(before));
    const strong = el("strong", "verb", verb);
    container.appendChild(strong);
    container.appendChild(el("sup", "verb-tag", "VERB"));
    container.appendChild(document.createTextNode(after));
  } catch (error) {
    console.error("bad predicate span, rendering untagged text", error);
    container.textContent = task.text;
  }
  return container;
}

function optionRow(
  title: string,
  options: string[],
  selected: string | null,
  pick: (value: string) => void,
): HTMLElement {
  const row = el("div", "options");
  row.appendChild(el("span", "options-title", title));
  for (const option of options) {
    const button = el("button", option === selected ? "option selected" : "option", option);
    button.addEventListener("click", () => pick(option));
    row.appendChild(button);
  }
  return row;
}

class Page {
  private view: TaskView | null = null;
  private readonly root: HTMLElement;

  constructor(private readonly annotator: string) {
    this.root = document.getElementById("app")!;
    document.addEventListener("keydown", (event) => {
      if (this.view === null) return;
      const action = actionForKey(event.key, this.view.task);
      if (action) this.apply(action);
    });
  }

  async start(): Promise<void> {
    const task = await client.nextTask(this.annotator);
    this.view = task === null ? null : newView(task);
    await this.render();
  }

  private apply(action: Action): void {
    if (this.view === null) return;
    this.view = reduce(this.view, action);
    void this.render();
  }

  private async submit(): Promise<void> {
    if (this.view === null || !canSubmit(this.view)) return;
    const { task, player, sentiment } = this.view;
    this.apply({ kind: "submit-start" });
    try {
      await client.submit({
        task_id: task.task_id,
        annotator_id: this.annotator,
        player: player!,
        sentiment: sentiment!,
      });
    } catch (error) {
      this.apply({ kind: "submit-failure", error: String(error) });
      return;
    }
    this.apply({ kind: "submit-success" });
    await this.start();
  }

  private async render(): Promise<void> {
    this.root.replaceChildren();
    if (this.view === null) {
      this.root.appendChild(el("h2", "done", "All tasks annotated. Thank you!"));
      return;
    }
    const view = this.view;

    if (view.error !== null) {
      const banner = el("div", "error-banner", `Submission failed: ${view.error} `);
      const retry = el("button", "retry", "Retry");
      retry.addEventListener("click", () => void this.submit());
      banner.appendChild(retry);
      this.root.appendChild(banner);
    }

    this.root.appendChild(renderBoard(boardOrPlaceholder(view.task.board_fen)));
    this.root.appendChild(renderSentence(view.task));
    this.root.appendChild(
      optionRow("Player (w/b)", view.task.player_options, view.player, (player) =>
        this.apply({ kind: "select-player", player }),
      ),
    );
    this.root.appendChild(
      optionRow("Sentiment (1-4)", view.task.sentiment_options, view.sentiment, (sentiment) =>
        this.apply({ kind: "select-sentiment", sentiment }),
      ),
    );

    const submit = el("button", "submit", view.status === "submitting" ? "Submitting…" : "Submit");
    submit.disabled = !canSubmit(view);
    submit.addEventListener("click", () => void this.submit());
    this.root.appendChild(submit);

    const progress = await client.progress(this.annotator);
    const kappa = progress.kappa === null ? "n/a" : progress.kappa.toFixed(3);
    this.root.appendChild(
      el(
        "div",
        "progress",
        `answered ${progress.answered}, remaining ${progress.remaining}, kappa ${kappa}`,
      ),
    );
  }
}

const annotator = new URLSearchParams(window.location.search).get("annotator") ?? "a1";
void new Page(annotator).start();
