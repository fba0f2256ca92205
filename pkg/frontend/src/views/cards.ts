/** Card grid: name, overall score, most recent degree, triangle chart, bookmark. */

import { esc, scoreText } from "../format.js";
import type { CandidateListResponse, CandidateRow } from "../types.js";

// education on top, work bottom-left, skills bottom-right
const AXIS_ANGLES = [-Math.PI / 2, (Math.PI * 5) / 6, Math.PI / 6];

function axisPoint(angle: number, value: number, cx: number, cy: number, r: number): [number, number] {
  const clamped = Math.max(0, Math.min(100, value));
  const radius = (r * clamped) / 100;
  return [cx + radius * Math.cos(angle), cy + radius * Math.sin(angle)];
}

/** Polygon points for the three category axes, linearly scaled 0-100. */
export function trianglePoints(
  education: number,
  work: number,
  skills: number,
  cx = 60,
  cy = 62,
  r = 52,
): string {
  const values = [education, work, skills];
  return AXIS_ANGLES.map((angle, i) => {
    const [x, y] = axisPoint(angle, values[i], cx, cy, r);
    return `${x.toFixed(2)},${y.toFixed(2)}`;
  }).join(" ");
}

export function triangleSvg(row: CandidateRow): string {
  const card = row.scorecard;
  const frame = trianglePoints(100, 100, 100);
  const shape = trianglePoints(card.education_score, card.work_score, card.skills_score);
  return (
    `<svg class="radar" viewBox="0 0 120 120" role="img" aria-label="score triangle">` +
    `<polygon class="radar-frame" points="${frame}"></polygon>` +
    `<polygon class="radar-shape" points="${shape}"></polygon>` +
    `<text class="radar-axis" x="60" y="8">edu</text>` +
    `<text class="radar-axis" x="10" y="104">work</text>` +
    `<text class="radar-axis" x="96" y="104">skills</text>` +
    `</svg>`
  );
}

export function renderCardView(response: CandidateListResponse): string {
  if (response.candidates.length === 0) {
    return `<p class="empty">No candidates match the current filters.</p>`;
  }
  const cards = response.candidates.map((row) => {
    const name = esc(row.name ?? row.candidate_id);
    const degree = row.most_recent_degree ? esc(row.most_recent_degree) : "no degree found";
    const star = row.bookmarked ? "★" : "☆";
    return (
      `<article class="card" data-cid="${esc(row.candidate_id)}">` +
      `<header><h3 class="card-name" data-open="${esc(row.candidate_id)}">${name}</h3>` +
      `<button class="bookmark" data-bookmark="${esc(row.candidate_id)}" ` +
      `aria-pressed="${row.bookmarked}">${star}</button></header>` +
      `<div class="card-overall">${scoreText(row.scorecard.overall_score)}</div>` +
      `<div class="card-degree">${degree}</div>` +
      triangleSvg(row) +
      `</article>`
    );
  });
  return `<div class="card-grid">${cards.join("")}</div>`;
}
