/** Profile inspection: positioned document blocks beside extracted-info cards.
 *
 * Hover highlighting is a pure lookup from card items to their provenance
 * block indices, exactly as supplied by the API; no client-side text search.
 */

import { esc, scoreText, spanText } from "../format.js";
import type { DetailResponse } from "../types.js";

export type HoverTarget =
  | { kind: "personal"; field: string }
  | { kind: "education"; index: number }
  | { kind: "work"; index: number }
  | { kind: "skill-mention"; index: number }
  | { kind: "skill-token"; token: string };

/** Block indices to highlight for a hovered card item. */
export function hoverBlocks(detail: DetailResponse, target: HoverTarget): number[] {
  const profile = detail.candidate;
  switch (target.kind) {
    case "personal":
      return [...(profile.provenance[target.field] ?? [])];
    case "education":
      return [...(profile.educations[target.index]?.source_blocks ?? [])];
    case "work":
      return [...(profile.works[target.index]?.source_blocks ?? [])];
    case "skill-mention":
      return [...(profile.skills[target.index]?.[2] ?? [])];
    case "skill-token": {
      const blocks = new Set<number>();
      for (const [, token, sources] of profile.skills) {
        if (token === target.token) {
          for (const b of sources) blocks.add(b);
        }
      }
      return [...blocks].sort((a, b) => a - b);
    }
  }
}

function hoverAttr(target: HoverTarget): string {
  return `data-hover='${esc(JSON.stringify(target))}'`;
}

const PAGE_WIDTH = 612;
const PAGE_HEIGHT = 792;

export function renderDocumentPane(detail: DetailResponse, highlighted: Set<number>): string {
  const blocks = detail.document.blocks;
  const pages = blocks.length ? Math.max(...blocks.map((b) => b[1])) + 1 : 1;
  const divs = blocks
    .map((block, index) => {
      const [text, page, x, y, width, height, fontSize, bold] = block;
      const top = page * PAGE_HEIGHT + y;
      const cls = highlighted.has(index) ? "doc-block highlight" : "doc-block";
      const weight = bold ? "font-weight:bold;" : "";
      const style =
        `left:${(x / PAGE_WIDTH) * 100}%;top:${top}px;` +
        `width:${(width / PAGE_WIDTH) * 100}%;min-height:${height}px;` +
        `font-size:${fontSize}px;${weight}`;
      return `<div class="${cls}" data-block="${index}" style="${style}">${esc(text)}</div>`;
    })
    .join("");
  return `<div class="doc-pane" style="height:${pages * PAGE_HEIGHT}px">${divs}</div>`;
}

function personalCard(detail: DetailResponse): string {
  const profile = detail.candidate;
  const fields: [string, string | null][] = [
    ["name", profile.name],
    ["email", profile.email],
    ["phone", profile.phone],
    ["location", profile.location],
  ];
  const items = fields
    .filter(([, value]) => value !== null)
    .map(
      ([field, value]) =>
        `<li ${hoverAttr({ kind: "personal", field })}><span class="k">${esc(field)}</span> ${esc(value as string)}</li>`,
    )
    .join("");
  return `<section class="pcard"><h3>Personal</h3><ul>${items || "<li>none extracted</li>"}</ul></section>`;
}

function educationCard(detail: DetailResponse): string {
  const items = detail.candidate.educations
    .map((entry, index) => {
      const line = [
        entry.institution_raw || "(unknown institution)",
        entry.degree,
        entry.field_of_study ?? "",
        spanText(entry.span),
      ]
        .filter((part) => part !== "")
        .join(" · ");
      return `<li ${hoverAttr({ kind: "education", index })}>${esc(line)}</li>`;
    })
    .join("");
  return `<section class="pcard"><h3>Education</h3><ul>${items || "<li>none extracted</li>"}</ul></section>`;
}

function workCard(detail: DetailResponse): string {
  const items = detail.candidate.works
    .map((entry, index) => {
      const line = [entry.employer_raw, entry.title ?? "", spanText(entry.span)]
        .filter((part) => part !== "")
        .join(" · ");
      return `<li ${hoverAttr({ kind: "work", index })}>${esc(line)}</li>`;
    })
    .join("");
  return `<section class="pcard"><h3>Work Experience</h3><ul>${items || "<li>none extracted</li>"}</ul></section>`;
}

function skillsCard(detail: DetailResponse): string {
  const seen = new Set<string>();
  const chips: string[] = [];
  detail.candidate.skills.forEach(([raw, token], index) => {
    if (seen.has(token)) return;
    seen.add(token);
    chips.push(
      `<span class="chip" ${hoverAttr({ kind: "skill-token", token })}>${esc(raw)}</span>`,
    );
  });
  return `<section class="pcard"><h3>Skills</h3><div class="chips">${chips.join("") || "none extracted"}</div></section>`;
}

function desiredSkillsCard(detail: DetailResponse): string {
  const items = detail.scorecard.skill_matches
    .map((match) => {
      const related = detail.related_skills[match.desired] ?? [];
      const contributions = related
        .map(
          (r) =>
            `<li ${hoverAttr({ kind: "skill-token", token: r.token })}>` +
            `${esc(r.token)} <span class="similarity">${scoreText(r.similarity)}%</span></li>`,
        )
        .join("");
      const matchedAttr =
        match.matched !== null ? hoverAttr({ kind: "skill-token", token: match.matched }) : "";
      const matchedText = match.matched !== null ? esc(match.matched) : "no match";
      return (
        `<details class="desired-skill"><summary ${matchedAttr}>` +
        `${esc(match.desired)} <span class="match-score">${scoreText(match.score)}</span>` +
        ` <span class="matched-as">via ${matchedText}</span></summary>` +
        `<ul class="related">${contributions || "<li>no contributing skills</li>"}</ul></details>`
      );
    })
    .join("");
  return `<section class="pcard"><h3>Desired Skills</h3>${items}</section>`;
}

function jobScoresCard(detail: DetailResponse): string {
  const items = detail.job_scores
    .map(
      (job) =>
        `<li><span class="k">${esc(job.name)}</span> ` +
        `<span class="match-score">${scoreText(job.overall_score)}</span></li>`,
    )
    .join("");
  return `<section class="pcard"><h3>Job Scores</h3><ul>${items}</ul></section>`;
}

export function renderProfileCards(detail: DetailResponse): string {
  return (
    personalCard(detail) +
    educationCard(detail) +
    workCard(detail) +
    skillsCard(detail) +
    desiredSkillsCard(detail) +
    jobScoresCard(detail)
  );
}

export function renderProfileView(detail: DetailResponse, highlighted: Set<number>): string {
  return (
    `<div class="profile-layout">` +
    `<div class="profile-left">${renderDocumentPane(detail, highlighted)}</div>` +
    `<div class="profile-right">${renderProfileCards(detail)}</div>` +
    `</div>`
  );
}
