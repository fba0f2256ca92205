import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  hoverBlocks,
  renderDocumentPane,
  renderProfileCards,
} from "../src/views/profile_view.js";
import type { DetailResponse } from "../src/types.js";

const detail: DetailResponse = JSON.parse(
  readFileSync(new URL("./fixtures/candidate_detail.json", import.meta.url), "utf-8"),
);

describe("hover highlighting", () => {
  it("maps each skill mention to exactly its provenance blocks", () => {
    detail.candidate.skills.forEach(([, , sourceBlocks], index) => {
      expect(hoverBlocks(detail, { kind: "skill-mention", index })).toEqual(sourceBlocks);
    });
  });

  it("maps a skill token to the union of its mentions' blocks", () => {
    const byToken = new Map<string, Set<number>>();
    for (const [, token, blocks] of detail.candidate.skills) {
      const set = byToken.get(token) ?? new Set<number>();
      for (const b of blocks) set.add(b);
      byToken.set(token, set);
    }
    for (const [token, blocks] of byToken) {
      expect(hoverBlocks(detail, { kind: "skill-token", token })).toEqual(
        [...blocks].sort((a, b) => a - b),
      );
    }
  });

  it("maps education and work entries to their source blocks", () => {
    detail.candidate.educations.forEach((entry, index) => {
      expect(hoverBlocks(detail, { kind: "education", index })).toEqual(entry.source_blocks);
    });
    detail.candidate.works.forEach((entry, index) => {
      expect(hoverBlocks(detail, { kind: "work", index })).toEqual(entry.source_blocks);
    });
  });

  it("maps personal fields through the provenance table", () => {
    for (const [field, blocks] of Object.entries(detail.candidate.provenance)) {
      expect(hoverBlocks(detail, { kind: "personal", field })).toEqual(blocks);
    }
  });

  it("returns nothing for unknown targets", () => {
    expect(hoverBlocks(detail, { kind: "skill-token", token: "no-such-token" })).toEqual([]);
    expect(hoverBlocks(detail, { kind: "education", index: 999 })).toEqual([]);
  });
});

describe("document pane", () => {
  it("renders every block at its document position", () => {
    const html = renderDocumentPane(detail, new Set());
    expect(html.match(/doc-block/g)).toHaveLength(detail.document.blocks.length);
    detail.document.blocks.forEach((_, index) => {
      expect(html).toContain(`data-block="${index}"`);
    });
  });

  it("highlights exactly the requested blocks", () => {
    const targets = hoverBlocks(detail, { kind: "skill-mention", index: 0 });
    const html = renderDocumentPane(detail, new Set(targets));
    const highlighted = [...html.matchAll(/class="doc-block highlight" data-block="(\d+)"/g)].map(
      (m) => Number(m[1]),
    );
    expect(highlighted.sort((a, b) => a - b)).toEqual([...targets].sort((a, b) => a - b));
  });
});

describe("profile cards", () => {
  it("shows related skills with their exact similarity values", () => {
    const html = renderProfileCards(detail);
    for (const related of Object.values(detail.related_skills)) {
      for (const item of related) {
        expect(html).toContain(`${String(item.similarity)}%`);
      }
    }
  });

  it("lists job scores in API order (already sorted by the server)", () => {
    const html = renderProfileCards(detail);
    const positions = detail.job_scores.map((job) => html.indexOf(String(job.overall_score)));
    expect([...positions]).toEqual([...positions].sort((a, b) => a - b));
    const scores = detail.job_scores.map((j) => j.overall_score);
    expect([...scores]).toEqual([...scores].sort((a, b) => b - a));
  });

  it("attaches hover targets to every extracted item", () => {
    const html = renderProfileCards(detail);
    const hoverCount = (html.match(/data-hover=/g) ?? []).length;
    expect(hoverCount).toBeGreaterThanOrEqual(
      detail.candidate.educations.length +
        detail.candidate.works.length +
        new Set(detail.candidate.skills.map(([, t]) => t)).size,
    );
  });
});
