/** Score chart: one skill/work bar pair per candidate.
 *
 * The pair order is exactly the order the API delivered (the ScoreChart sort
 * mode already encodes "skills descending, work breaks ties"); the client
 * never reorders.
 */

import { esc, scoreText } from "../format.js";
import type { CandidateListResponse } from "../types.js";

export interface ChartPair {
  candidateId: string;
  name: string;
  skills: number;
  work: number;
}

export function buildScoreChart(response: CandidateListResponse): ChartPair[] {
  return response.candidates.map((row) => ({
    candidateId: row.candidate_id,
    name: row.name ?? row.candidate_id,
    skills: row.scorecard.skills_score,
    work: row.scorecard.work_score,
  }));
}

export function renderScoreChart(pairs: ChartPair[]): string {
  if (pairs.length === 0) {
    return `<p class="empty">No candidates match the current filters.</p>`;
  }
  const rows = pairs
    .map((pair) => {
      const skillsWidth = Math.max(0, Math.min(100, pair.skills));
      const workWidth = Math.max(0, Math.min(100, pair.work));
      return (
        `<div class="chart-row" data-open="${esc(pair.candidateId)}">` +
        `<div class="chart-name">${esc(pair.name)}</div>` +
        `<div class="chart-bars">` +
        `<div class="bar bar-skills" style="width:${skillsWidth}%"><span>${scoreText(pair.skills)}</span></div>` +
        `<div class="bar bar-work" style="width:${workWidth}%"><span>${scoreText(pair.work)}</span></div>` +
        `</div></div>`
      );
    })
    .join("");
  return (
    `<div class="score-chart">` +
    `<div class="chart-legend"><span class="swatch bar-skills"></span>skills` +
    `<span class="swatch bar-work"></span>work</div>` +
    rows +
    `</div>`
  );
}
