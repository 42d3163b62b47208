// DOM wiring: hash-routed single-page workbench over the analysis service.
// Routes: #/ (upload), #/analyses/<id> (report), #/corpus (histogram).

import { ApiClient, ApiError } from "./api.js";
import type { AnalysisResponse, Delta } from "./types.js";
import {
  canSubmitRescore,
  renderDeltaCard,
  renderErrorBanner,
  renderHistogram,
  renderLineage,
  renderReportView,
} from "./views.js";

const BASE_URL =
  (document.querySelector("meta[name=bloomgate-api]") as HTMLMetaElement | null)?.content ??
  "http://127.0.0.1:8765";

const api = new ApiClient(BASE_URL);
const app = document.getElementById("app")!;

let rescoreInFlight = false;
let lastDelta: { analysisId: string; delta: Delta } | null = null;

function setBanner(target: HTMLElement, code: string, message: string): void {
  target.querySelectorAll(".error-banner").forEach((el) => el.remove());
  target.insertAdjacentHTML("afterbegin", renderErrorBanner(code, message));
}

function showError(err: unknown, target: HTMLElement = app): void {
  if (err instanceof ApiError) {
    setBanner(target, err.code, err.message);
  } else {
    setBanner(target, "Internal", String(err));
  }
}

function navHtml(): string {
  return `<nav class="top">
    <a href="#/">Upload</a>
    <a href="#/corpus">Corpus histogram</a>
  </nav>`;
}

function renderUploadView(): void {
  app.innerHTML = `${navHtml()}
<section class="upload">
  <h2>Analyze an assessment</h2>
  <form id="upload-form">
    <label>Title <input type="text" name="title" placeholder="Week 3 quiz"></label>
    <label>File (.txt, .md, .pdf) <input type="file" name="file"></label>
    <p>or paste the assessment text:</p>
    <textarea name="text" rows="10" placeholder="Q1. ..."></textarea>
    <button type="submit">Analyze</button>
  </form>
  <div id="progress" hidden>Analyzing, this can take a moment...</div>
</section>`;

  const form = document.getElementById("upload-form") as HTMLFormElement;
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const title = String(data.get("title") ?? "") || "untitled";
    const file = data.get("file") as File | null;
    const text = String(data.get("text") ?? "");
    const progress = document.getElementById("progress")!;
    progress.hidden = false;
    try {
      const outcome =
        file && file.size > 0
          ? await api.analyzeFile(file.name, file, title)
          : await api.analyzeText(title, text);
      const result =
        outcome.kind === "done" ? outcome.result : await api.pollJob(outcome.job);
      lastDelta = null;
      location.hash = `#/analyses/${encodeURIComponent(result.analysis_id)}`;
    } catch (err) {
      progress.hidden = true;
      showError(err);
    }
  });
}

function attachEditors(analysis: AnalysisResponse): void {
  app.querySelectorAll<HTMLButtonElement>(".edit-btn").forEach((button) => {
    button.addEventListener("click", () => {
      const index = Number(button.dataset.index);
      const row = button.closest(".question-row")!;
      const textEl = row.querySelector(".qtext")!;
      const original = analysis.report.questions[index]?.text ?? "";
      textEl.innerHTML = `
        <textarea class="edit-area" rows="3">${original}</textarea>
        <button class="rescore-btn">Rescore</button>
        <button class="cancel-btn">Cancel</button>`;
      const area = textEl.querySelector(".edit-area") as HTMLTextAreaElement;
      const rescoreBtn = textEl.querySelector(".rescore-btn") as HTMLButtonElement;
      const sync = () => {
        rescoreBtn.disabled = !canSubmitRescore(area.value, rescoreInFlight);
      };
      area.addEventListener("input", sync);
      sync();
      textEl.querySelector(".cancel-btn")!.addEventListener("click", () => {
        renderAnalysisView(analysis.analysis_id);
      });
      rescoreBtn.addEventListener("click", async () => {
        if (!canSubmitRescore(area.value, rescoreInFlight)) return;
        rescoreInFlight = true;
        sync();
        try {
          const response = await api.rescore(analysis.analysis_id, index, area.value);
          lastDelta = { analysisId: response.analysis_id, delta: response.delta };
          location.hash = `#/analyses/${encodeURIComponent(response.analysis_id)}`;
        } catch (err) {
          showError(err);
        } finally {
          rescoreInFlight = false;
        }
      });
    });
  });
}

async function renderAnalysisView(id: string): Promise<void> {
  try {
    const analysis = await api.getAnalysis(id);
    const lineage = await api.getLineage(id);
    const deltaHtml =
      lastDelta && lastDelta.analysisId === id ? renderDeltaCard(lastDelta.delta) : "";
    app.innerHTML = `${navHtml()}
${renderLineage(lineage, id)}
${deltaHtml}
${renderReportView(analysis)}`;
    attachEditors(analysis);
  } catch (err) {
    app.innerHTML = navHtml();
    showError(err);
  }
}

async function renderCorpusView(): Promise<void> {
  try {
    const hist = await api.histogram();
    app.innerHTML = `${navHtml()}
<h2>Corpus ease distribution</h2>
${renderHistogram(hist)}`;
  } catch (err) {
    app.innerHTML = navHtml();
    showError(err);
  }
}

function route(): void {
  const hash = location.hash || "#/";
  const analysisMatch = /^#\/analyses\/(.+)$/.exec(hash);
  if (analysisMatch?.[1]) {
    void renderAnalysisView(decodeURIComponent(analysisMatch[1]));
  } else if (hash === "#/corpus") {
    void renderCorpusView();
  } else {
    renderUploadView();
  }
}

window.addEventListener("hashchange", route);
route();
