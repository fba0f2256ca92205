/** Console entry point: state, data fetching, event wiring. */

import {
  ApiRequestError,
  fetchAutocomplete,
  fetchCandidates,
  fetchDetail,
  fetchJobs,
  putBookmark,
} from "./api.js";
import { initialState, RequestSequencer, ViewState } from "./state.js";
import type { CandidateListResponse, DetailResponse, JobPayload } from "./types.js";
import { renderCardView } from "./views/cards.js";
import { renderFilterPanel, renderSuggestions, renderToolbar } from "./views/filter_panel.js";
import { hoverBlocks, HoverTarget, renderProfileView } from "./views/profile_view.js";
import { buildScoreChart, renderScoreChart } from "./views/score_chart.js";
import { buildScoreTable, renderScoreTable } from "./views/score_table.js";

const state: ViewState = initialState();
const listSequencer = new RequestSequencer();

let jobs: JobPayload[] = [];
let listing: CandidateListResponse | null = null;
let detail: DetailResponse | null = null;

const el = (id: string) => document.getElementById(id) as HTMLElement;

function showError(message: string) {
  const banner = el("error-banner");
  banner.textContent = message;
  banner.hidden = false;
}

function clearError() {
  el("error-banner").hidden = true;
}

function renderFilters() {
  el("filter-panel").innerHTML = renderFilterPanel(state, jobs);
  el("toolbar").innerHTML = renderToolbar(state);
}

function renderMain() {
  const main = el("main-view");
  if (state.view === "profile" && detail) {
    main.innerHTML = renderProfileView(detail, new Set());
    return;
  }
  if (!listing) {
    main.innerHTML = `<p class="empty">Pick a job template to load candidates.</p>`;
    return;
  }
  if (state.view === "table") {
    main.innerHTML = renderScoreTable(buildScoreTable(listing), state.sort);
  } else if (state.view === "chart") {
    main.innerHTML = renderScoreChart(buildScoreChart(listing));
  } else {
    main.innerHTML = renderCardView(listing);
  }
}

async function refreshCandidates() {
  if (!state.jobId) return;
  const sequence = listSequencer.next();
  try {
    const response = await fetchCandidates(state);
    if (!listSequencer.accept(sequence)) return;  // a newer response already landed
    listing = response;
    clearError();
  } catch (error) {
    if (!listSequencer.accept(sequence)) return;
    if (error instanceof ApiRequestError) {
      showError(`${error.code}: ${error.message}`);  // keep the previous list
    } else {
      showError(String(error));
    }
  }
  renderMain();
}

async function openProfile(candidateId: string) {
  if (!state.jobId) return;
  try {
    detail = await fetchDetail(candidateId, state.jobId);
    state.selectedCandidate = candidateId;
    state.view = "profile";
    clearError();
    renderMain();
  } catch (error) {
    showError(error instanceof ApiRequestError ? error.message : String(error));
  }
}

function applyTemplate(jobId: string) {
  const job = jobs.find((j) => j.job_id === jobId) ?? null;
  state.jobId = job ? job.job_id : null;
  state.skills = job ? [...job.desired_skills] : [];
  state.selectedCandidate = null;
  if (state.view === "profile") state.view = "cards";
  renderFilters();
  void refreshCandidates();
}

function setHighlights(targets: number[]) {
  const blocks = document.querySelectorAll<HTMLElement>(".doc-block");
  const wanted = new Set(targets);
  blocks.forEach((block) => {
    const index = Number(block.dataset.block);
    block.classList.toggle("highlight", wanted.has(index));
  });
}

function wireEvents() {
  document.body.addEventListener("change", (event) => {
    const target = event.target as HTMLElement;
    if (target.id === "job-select") {
      applyTemplate((target as HTMLSelectElement).value);
    } else if (target.id === "min-years") {
      state.minYears = (target as HTMLInputElement).value;
      void refreshCandidates();
    } else if (target.id === "sort-select") {
      state.sort = (target as HTMLSelectElement).value as ViewState["sort"];
      if (state.view === "profile") state.view = "cards";
      void refreshCandidates();
    } else if (target.dataset.degree) {
      const box = target as HTMLInputElement;
      if (box.checked) state.degrees.add(box.dataset.degree as string);
      else state.degrees.delete(box.dataset.degree as string);
      void refreshCandidates();
    }
  });

  document.body.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>(
      "[data-view],[data-sort],[data-open],[data-bookmark],[data-add-skill],[data-remove-skill]",
    );
    if (!target) return;
    if (target.dataset.view) {
      state.view = target.dataset.view as ViewState["view"];
      renderFilters();
      renderMain();
    } else if (target.dataset.sort) {
      state.sort = target.dataset.sort as ViewState["sort"];
      renderFilters();
      void refreshCandidates();
    } else if (target.dataset.bookmark) {
      event.stopPropagation();
      const cid = target.dataset.bookmark;
      const pressed = target.getAttribute("aria-pressed") === "true";
      void putBookmark(cid, !pressed)
        .then(() => refreshCandidates())
        .catch((error) => showError(String(error)));
    } else if (target.dataset.open) {
      void openProfile(target.dataset.open);
    } else if (target.dataset.addSkill) {
      if (!state.skills.includes(target.dataset.addSkill)) {
        state.skills.push(target.dataset.addSkill);
      }
      el("skill-suggestions").hidden = true;
      renderFilters();
      void refreshCandidates();
    } else if (target.dataset.removeSkill) {
      state.skills = state.skills.filter((t) => t !== target.dataset.removeSkill);
      renderFilters();
      void refreshCandidates();
    }
  });

  document.body.addEventListener("input", (event) => {
    const target = event.target as HTMLInputElement;
    if (target.id !== "skill-input") return;
    const prefix = target.value.trim();
    const box = el("skill-suggestions");
    if (prefix === "") {
      box.hidden = true;
      return;
    }
    void fetchAutocomplete(prefix).then((response) => {
      box.innerHTML = renderSuggestions(response.suggestions);
      box.hidden = response.suggestions.length === 0;
    });
  });

  document.body.addEventListener("mouseover", (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>("[data-hover]");
    if (!target || !detail) return;
    const hover = JSON.parse(target.dataset.hover as string) as HoverTarget;
    setHighlights(hoverBlocks(detail, hover));
  });
  document.body.addEventListener("mouseout", (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>("[data-hover]");
    if (target) setHighlights([]);
  });
}

async function start() {
  wireEvents();
  try {
    jobs = (await fetchJobs()).jobs;
  } catch (error) {
    showError(`could not load job templates: ${String(error)}`);
  }
  renderFilters();
  renderMain();
}

void start();
