/** Filter panel: job templates, degree checkboxes, min-years, skill chips. */

import { esc } from "../format.js";
import type { JobPayload, Suggestion } from "../types.js";
import type { ViewState } from "../state.js";

const DEGREES = ["Bachelor", "Master", "Doctoral", "Other"];

export function renderFilterPanel(state: ViewState, jobs: JobPayload[]): string {
  const options = jobs
    .map(
      (job) =>
        `<option value="${esc(job.job_id)}"${job.job_id === state.jobId ? " selected" : ""}>` +
        `${esc(job.name)}</option>`,
    )
    .join("");
  const degreeBoxes = DEGREES.map(
    (degree) =>
      `<label class="degree-box"><input type="checkbox" data-degree="${degree}"` +
      `${state.degrees.has(degree) ? " checked" : ""}> ${degree}</label>`,
  ).join("");
  const chips = state.skills
    .map(
      (token) =>
        `<span class="chip">${esc(token)}<button class="chip-x" data-remove-skill="${esc(token)}">×</button></span>`,
    )
    .join("");
  return (
    `<div class="filter-row">` +
    `<label>Job template <select id="job-select"><option value="">choose…</option>${options}</select></label>` +
    `<label>Min years <input id="min-years" type="number" min="0" step="0.5" value="${esc(state.minYears)}"></label>` +
    `<fieldset class="degrees"><legend>Most recent degree</legend>${degreeBoxes}</fieldset>` +
    `</div>` +
    `<div class="filter-row skills-row">` +
    `<label>Desired skills <input id="skill-input" type="text" placeholder="type to search…" autocomplete="off"></label>` +
    `<div id="skill-suggestions" class="suggestions" hidden></div>` +
    `<div class="chips">${chips}</div>` +
    `</div>`
  );
}

export function renderSuggestions(suggestions: Suggestion[]): string {
  if (suggestions.length === 0) return "";
  return suggestions
    .map(
      (s) =>
        `<button class="suggestion" data-add-skill="${esc(s.token)}">${esc(s.token)}</button>`,
    )
    .join("");
}

/** Sort mode toolbar + view switcher. */
export function renderToolbar(state: ViewState): string {
  const views: [string, string][] = [
    ["cards", "Cards"],
    ["table", "Scores"],
    ["chart", "Score Chart"],
  ];
  const buttons = views
    .map(
      ([view, label]) =>
        `<button class="view-btn${state.view === view ? " active" : ""}" data-view="${view}">${label}</button>`,
    )
    .join("");
  const sorts: [string, string][] = [
    ["overall", "overall"],
    ["education", "education"],
    ["work", "work"],
    ["skills", "skills"],
    ["scorechart", "score chart order"],
  ];
  const options = sorts
    .map(
      ([mode, label]) =>
        `<option value="${mode}"${state.sort === mode ? " selected" : ""}>${label}</option>`,
    )
    .join("");
  return (
    `<div class="toolbar">${buttons}` +
    `<label class="sort-label">Sort <select id="sort-select">${options}</select></label>` +
    `</div>`
  );
}
