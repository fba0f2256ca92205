/** Rendering helpers. Scores print exactly as the API sent them so every
 * number on screen is byte-traceable to a response field. */

export function scoreText(value: number): string {
  return String(value);
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function spanText(span: { start: string; resolved_end: string; open_ended: boolean } | null): string {
  if (!span) return "";
  return span.open_ended ? `${span.start} (ongoing)` : `${span.start} / ${span.resolved_end}`;
}
