/** Score table: category and per-skill columns, API-flagged top-decile cells.
 *
 * Rows keep the API's response order and cell flags come straight from each
 * row's top_decile map; sorting happens server-side via the sort mode baked
 * into each header.
 */

import { esc, scoreText } from "../format.js";
import type { CandidateListResponse } from "../types.js";

export interface TableCell {
  column: string;
  text: string;
  green: boolean;
}

export interface TableRow {
  candidateId: string;
  name: string;
  cells: TableCell[];
}

export interface ScoreTableModel {
  columns: string[];       // category + per-skill columns, in header order
  sortModes: string[];     // sort mode per column
  rows: TableRow[];        // exactly the API response order
}

const CATEGORY_COLUMNS = ["education", "work", "skills"];

export function buildScoreTable(response: CandidateListResponse): ScoreTableModel {
  const skillColumns = response.columns.filter((c) => c.startsWith("skill:"));
  const columns = [...CATEGORY_COLUMNS, ...skillColumns];
  const rows = response.candidates.map((row) => {
    const card = row.scorecard;
    const cells = columns.map((column) => {
      let value: number;
      if (column === "education") value = card.education_score;
      else if (column === "work") value = card.work_score;
      else if (column === "skills") value = card.skills_score;
      else {
        const token = column.slice("skill:".length);
        const match = card.skill_matches.find((m) => m.desired === token);
        value = match ? match.score : 0;
      }
      return { column, text: scoreText(value), green: row.top_decile[column] === true };
    });
    return { candidateId: row.candidate_id, name: row.name ?? row.candidate_id, cells };
  });
  return { columns, sortModes: [...columns], rows };
}

function headerLabel(column: string): string {
  return column.startsWith("skill:") ? column.slice("skill:".length) : column;
}

export function renderScoreTable(model: ScoreTableModel, activeSort: string): string {
  const headers = model.columns
    .map((column, i) => {
      const active = model.sortModes[i] === activeSort ? " sorted" : "";
      return `<th class="sortable${active}" data-sort="${esc(model.sortModes[i])}">${esc(headerLabel(column))}</th>`;
    })
    .join("");
  const rows = model.rows
    .map((row) => {
      const cells = row.cells
        .map((cell) => `<td class="${cell.green ? "top-decile" : ""}">${cell.text}</td>`)
        .join("");
      return `<tr data-open="${esc(row.candidateId)}"><td class="name-cell">${esc(row.name)}</td>${cells}</tr>`;
    })
    .join("");
  return (
    `<table class="score-table"><thead><tr><th>candidate</th>${headers}</tr></thead>` +
    `<tbody>${rows}</tbody></table>`
  );
}
