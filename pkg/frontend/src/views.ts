// Pure render functions: report JSON in, HTML strings out. Values are
// interpolated verbatim; every score and band shown originates server-side.

import {
  BAND_ORDER,
  type AnalysisResponse,
  type BandLabel,
  type Delta,
  type HistogramResponse,
  type LineageEntry,
  type QuestionRow,
  type Recommendation,
} from "./types.js";

export const BAND_COLORS: Record<BandLabel, string> = {
  Low: "#2e7d32",
  Medium: "#f9a825",
  "Medium-High": "#ef6c00",
  High: "#c62828",
};

export function escapeHtml(value: string): string {
  return value
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function bandChip(band: BandLabel): string {
  const color = BAND_COLORS[band];
  return (
    `<span class="band-chip" data-band="${band}" ` +
    `style="background:${color}">${band}</span>`
  );
}

function subscoreCell(value: number | null): string {
  if (value === null) {
    return `<td class="subscore unavailable">n/a</td>`;
  }
  return `<td class="subscore" data-value="${value}">${value}</td>`;
}

export function renderQuestionRow(q: QuestionRow, recommendations: Recommendation[]): string {
  const recs = recommendations.filter((r) => r.question_index === q.index);
  const recHtml = recs.length
    ? `<ul class="recs">` +
      recs
        .map(
          (r) =>
            `<li data-kind="${escapeHtml(r.kind)}" data-trigger="${escapeHtml(r.trigger)}">` +
            `${escapeHtml(r.text)}</li>`,
        )
        .join("") +
      `</ul>`
    : "";
  const flags = (q.flags ?? [])
    .map((f) => `<span class="flag">${escapeHtml(f)}</span>`)
    .join(" ");
  return (
    `<tr class="question-row" data-index="${q.index}" data-score="${q.score}" data-band="${q.band}">` +
    `<td class="qno">${q.index + 1}</td>` +
    `<td class="qtext"><span class="text">${escapeHtml(q.text)}</span>` +
    `<button class="edit-btn" data-index="${q.index}">Edit</button>${flags}${recHtml}</td>` +
    `<td class="bloom-badge">${escapeHtml(q.bloom.dominant)}</td>` +
    subscoreCell(q.subscores.judge) +
    subscoreCell(q.subscores.bloom) +
    subscoreCell(q.subscores.semantic) +
    subscoreCell(q.subscores.lexical) +
    `<td class="fused" data-value="${q.score}">${q.score}</td>` +
    `<td>${bandChip(q.band)}</td>` +
    `</tr>`
  );
}

export function renderReportView(analysis: AnalysisResponse): string {
  const report = analysis.report;
  const rows = report.questions
    .map((q) => renderQuestionRow(q, report.recommendations))
    .join("\n");
  const strengths = report.strengths.map((s) => `<li>${escapeHtml(s)}</li>`).join("");
  const weaknesses = report.weaknesses.map((w) => `<li>${escapeHtml(w)}</li>`).join("");
  const notices = (report.notices ?? [])
    .map((n) => `<p class="notice">${escapeHtml(n)}</p>`)
    .join("");
  return `
<section class="report" data-analysis-id="${escapeHtml(analysis.analysis_id)}">
  <h2>${escapeHtml(report.title)}</h2>
  <p class="assignment-verdict">
    Assignment AI-solvability:
    <strong data-score="${report.assignment.score}">${report.assignment.score}</strong>
    ${bandChip(report.assignment.band)}
  </p>
  ${notices}
  <table class="questions">
    <thead>
      <tr><th>#</th><th>Question</th><th>Bloom</th><th>Judge</th><th>Bloom sub</th>
      <th>Semantic</th><th>Lexical</th><th>Score</th><th>Band</th></tr>
    </thead>
    <tbody>
${rows}
    </tbody>
  </table>
  <div class="lists">
    <div><h3>Strengths</h3><ul class="strengths">${strengths}</ul></div>
    <div><h3>Weaknesses</h3><ul class="weaknesses">${weaknesses}</ul></div>
  </div>
</section>`;
}

function diffWords(oldText: string, newText: string): string {
  const a = oldText.split(/\s+/).filter(Boolean);
  const b = newText.split(/\s+/).filter(Boolean);
  // Longest common subsequence over words; inputs are question-sized.
  const lcs: number[][] = Array.from({ length: a.length + 1 }, () =>
    new Array<number>(b.length + 1).fill(0),
  );
  for (let i = a.length - 1; i >= 0; i--) {
    for (let j = b.length - 1; j >= 0; j--) {
      lcs[i]![j] =
        a[i] === b[j]
          ? lcs[i + 1]![j + 1]! + 1
          : Math.max(lcs[i + 1]![j]!, lcs[i]![j + 1]!);
    }
  }
  const parts: string[] = [];
  let i = 0;
  let j = 0;
  while (i < a.length && j < b.length) {
    if (a[i] === b[j]) {
      parts.push(escapeHtml(a[i]!));
      i++;
      j++;
    } else if (lcs[i + 1]![j]! >= lcs[i]![j + 1]!) {
      parts.push(`<del>${escapeHtml(a[i]!)}</del>`);
      i++;
    } else {
      parts.push(`<ins>${escapeHtml(b[j]!)}</ins>`);
      j++;
    }
  }
  while (i < a.length) parts.push(`<del>${escapeHtml(a[i++]!)}</del>`);
  while (j < b.length) parts.push(`<ins>${escapeHtml(b[j++]!)}</ins>`);
  return parts.join(" ");
}

export function renderDeltaCard(delta: Delta): string {
  const textDiff =
    delta.old_text !== undefined && delta.new_text !== undefined
      ? `<p class="text-diff">${diffWords(delta.old_text, delta.new_text)}</p>`
      : "";
  return `
<aside class="delta-card" data-question-index="${delta.question_index}">
  <h3>Rescore result for Q${delta.question_index + 1}</h3>
  <p class="scores">
    <span class="old" data-score="${delta.old_score}">${delta.old_score}</span>
    ${bandChip(delta.old_band)}
    <span class="arrow">to</span>
    <span class="new" data-score="${delta.new_score}">${delta.new_score}</span>
    ${bandChip(delta.new_band)}
  </p>
  ${textDiff}
</aside>`;
}

export function renderHistogram(hist: HistogramResponse): string {
  if (hist.total === 0) {
    return `<section class="histogram empty">
  <p class="empty-state">No analyses stored yet. Upload an assessment to begin.</p>
</section>`;
  }
  const max = Math.max(...BAND_ORDER.map((b) => hist.counts[b] ?? 0), 1);
  const bars = BAND_ORDER.map((band) => {
    const count = hist.counts[band] ?? 0;
    const width = (100 * count) / max;
    return (
      `<div class="bar-row" data-band="${band}" data-count="${count}">` +
      `<span class="bar-label">${band}</span>` +
      `<span class="bar" style="width:${width}%;background:${BAND_COLORS[band]}"></span>` +
      `<span class="bar-count">${count}</span></div>`
    );
  }).join("\n");
  return `<section class="histogram" data-total="${hist.total}">
${bars}
</section>`;
}

export function renderLineage(chain: LineageEntry[], currentId: string): string {
  const crumbs = chain
    .map((entry) => {
      const current = entry.analysis_id === currentId ? ' aria-current="page"' : "";
      const band = entry.band ? ` (${entry.band})` : "";
      return (
        `<a href="#/analyses/${encodeURIComponent(entry.analysis_id)}"${current}>` +
        `${escapeHtml(entry.analysis_id)}${band}</a>`
      );
    })
    .join(` <span class="crumb-sep">&gt;</span> `);
  return `<nav class="lineage">${crumbs}</nav>`;
}

export function renderErrorBanner(code: string, message: string): string {
  return (
    `<div class="error-banner" role="alert" data-code="${escapeHtml(code)}">` +
    `${escapeHtml(message)}</div>`
  );
}

// Rescore submissions are blocked while one is in flight and for empty edits.
export function canSubmitRescore(newText: string, inFlight: boolean): boolean {
  return !inFlight && newText.trim().length > 0;
}
