/** Questionnaire panel: 43 items in 13 category groups, 1..5 choices.
 *
 * Submission is blocked until every question has an answer (missing ones get
 * highlighted); on submit each answer becomes one utaut_answer command, and
 * once both groups have responses the children-vs-parents comparison is
 * fetched from the stats endpoint and rendered as table rows.
 */

import { ApiClient, ApiError } from "../api.js";
import type { UtautSchema } from "../types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

interface SubmittedResponse {
  respondent_id: string;
  group: string;
  dyad_id: string | null;
  answers: number[];
}

export class UtautPanel {
  private schema: UtautSchema | undefined;
  private answers = new Map<number, number>();
  private questionNodes = new Map<number, HTMLElement>();
  private submitted: SubmittedResponse[] = [];
  private summary = el("div", "utaut-summary");
  private submitButton = el("button", "cmd", "submit respondent") as HTMLButtonElement;

  constructor(
    private api: ApiClient,
    private sessionId: string,
    private root: HTMLElement,
  ) {}

  async mount(): Promise<void> {
    this.schema = await this.api.utautSchema();

    const form = el("div", "utaut-form");
    const respondent = el("input") as HTMLInputElement;
    respondent.placeholder = "respondent id";
    const group = el("select") as HTMLSelectElement;
    for (const value of ["child", "parent"]) {
      const option = el("option", undefined, value) as HTMLOptionElement;
      option.value = value;
      group.append(option);
    }
    const dyad = el("input") as HTMLInputElement;
    dyad.placeholder = "dyad id (optional)";
    form.append(respondent, group, dyad, this.submitButton);

    const questions = el("div", "utaut-questions");
    for (const category of this.schema.categories) {
      const section = el("section", "category");
      section.append(el("h3", undefined, `${category.title} (${category.code})`));
      for (const question of category.questions) {
        const row = el("div", "question");
        row.append(el("span", "qtext", `${question.index}. ${question.text}`));
        const choices = el("span", "choices");
        for (const step of this.schema.scale) {
          const label = el("label", undefined, String(step.value));
          const radio = el("input") as HTMLInputElement;
          radio.type = "radio";
          radio.name = `q${question.index}`;
          radio.value = String(step.value);
          radio.title = step.label;
          radio.addEventListener("change", () => {
            this.answers.set(question.index, step.value);
            row.classList.remove("missing");
            this.refreshSubmit();
          });
          label.prepend(radio);
          choices.append(label);
        }
        row.append(choices);
        this.questionNodes.set(question.index, row);
        section.append(row);
      }
      questions.append(section);
    }

    this.submitButton.addEventListener("click", () => {
      void this.submit(respondent.value, group.value, dyad.value || null)
        .catch((error) => this.toast(
          error instanceof ApiError ? `${error.code}: ${error.message}` : String(error)));
    });

    this.root.append(form, questions, this.summary);
    this.refreshSubmit();
  }

  unmount(): void {}

  missingQuestions(): number[] {
    const missing: number[] = [];
    for (let q = 1; q <= 43; q += 1) {
      if (!this.answers.has(q)) missing.push(q);
    }
    return missing;
  }

  private refreshSubmit(): void {
    this.submitButton.disabled = this.missingQuestions().length > 0;
  }

  private async submit(respondentId: string, group: string, dyadId: string | null) {
    const missing = this.missingQuestions();
    if (missing.length > 0 || !respondentId) {
      for (const q of missing) this.questionNodes.get(q)?.classList.add("missing");
      this.toast(`missing answers: ${missing.join(", ") || "respondent id"}`);
      return;
    }
    const answers: number[] = [];
    for (let q = 1; q <= 43; q += 1) {
      answers.push(this.answers.get(q)!);
      await this.api.command(this.sessionId, "utaut_answer", {
        respondent_id: respondentId,
        group,
        dyad_id: dyadId,
        question: q,
        answer: this.answers.get(q)!,
      });
    }
    this.submitted.push({ respondent_id: respondentId, group, dyad_id: dyadId, answers });
    this.answers.clear();
    for (const node of this.questionNodes.values()) node.classList.remove("missing");
    this.refreshSubmit();
    await this.renderSummary();
  }

  private async renderSummary(): Promise<void> {
    this.summary.replaceChildren(el("h3", undefined,
      `submitted respondents: ${this.submitted.length}`));
    const hasChildren = this.submitted.filter((r) => r.group === "child").length >= 2;
    const hasParents = this.submitted.filter((r) => r.group === "parent").length >= 2;
    if (!hasChildren || !hasParents) return;
    const report = await this.api.utautStats(
      this.submitted.map((r) => ({ ...r })),
    );
    const table = el("table", "comparison");
    const head = el("tr");
    for (const title of ["No.", "Item", "Children", "Parents", "P-value"]) {
      head.append(el("th", undefined, title));
    }
    table.append(head);
    const rows = report.categories as {
      item: string; mean_a: number; sd_a: number; mean_b: number; sd_b: number;
      p_two_tailed: number;
    }[];
    rows.forEach((row, index) => {
      const tr = el("tr", row.p_two_tailed <= 0.05 ? "significant" : undefined);
      tr.append(el("td", undefined, String(index + 1)));
      tr.append(el("td", undefined, row.item));
      tr.append(el("td", undefined, `${row.mean_a.toFixed(2)} (${row.sd_a.toFixed(2)})`));
      tr.append(el("td", undefined, `${row.mean_b.toFixed(2)} (${row.sd_b.toFixed(2)})`));
      tr.append(el("td", undefined, row.p_two_tailed.toFixed(2)));
      table.append(tr);
    });
    this.summary.append(table);
  }

  private toast(message: string): void {
    const node = el("div", "toast", message);
    this.root.append(node);
    setTimeout(() => node.remove(), 4000);
  }
}
