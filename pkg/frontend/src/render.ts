// Pure rendering helpers: every function maps service responses to HTML or
// SVG strings without touching the DOM, so they are unit-testable in node.

import type {
  NetworkDoc,
  PatientDisease,
  PatientDoc,
  TriggeringSymptom,
} from './api'

const SIGN_LABEL: Record<TriggeringSymptom['sign'], string> = {
  binary: 'present',
  suppress: 'suppressed',
  enhance: 'enhanced',
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
}

/** Stroke width / font emphasis for an edge, strictly increasing in its
 * posterior probability. */
export function edgeEmphasis(edgeProb: number): number {
  const clamped = Math.min(1, Math.max(0, edgeProb))
  return 1 + 5 * clamped
}

/** Diseases worth listing on a patient panel: probability at or above the
 * display threshold, sorted by decreasing probability (stable on ties). */
export function visibleDiseases(
  diseases: PatientDisease[],
  threshold: number,
): PatientDisease[] {
  return diseases
    .map((d, i) => ({ d, i }))
    .filter(({ d }) => d.probability >= threshold)
    .sort((a, b) => b.d.probability - a.d.probability || a.i - b.i)
    .map(({ d }) => d)
}

export function renderSymptomChip(s: TriggeringSymptom): string {
  const emphasis = edgeEmphasis(s.edge_prob)
  const title = `${SIGN_LABEL[s.sign]}, edge probability ${s.edge_prob.toFixed(2)}`
  const known = s.known ? ' chip-known' : ''
  return (
    `<span class="chip chip-${s.sign}${known}"` +
    ` style="border-width:${emphasis.toFixed(2)}px"` +
    ` data-edge-prob="${s.edge_prob}" title="${escapeHtml(title)}">` +
    `${escapeHtml(s.name)}</span>`
  )
}

export function renderDiseaseRow(d: PatientDisease): string {
  const pct = (100 * d.probability).toFixed(0)
  const badge = d.known
    ? '<span class="badge badge-known">known diagnosis</span>'
    : '<span class="badge badge-inferred">inferred</span>'
  const chips = d.triggering_symptoms.map(renderSymptomChip).join('')
  return (
    `<div class="disease-row" data-name="${escapeHtml(d.name)}">` +
    `<div class="disease-head">` +
    `<span class="disease-name">${escapeHtml(d.name)}</span>${badge}` +
    `<span class="prob-label">${d.probability.toFixed(2)}</span>` +
    `</div>` +
    `<div class="prob-track"><div class="prob-bar" style="width:${pct}%"></div></div>` +
    `<div class="chips">${chips || '<span class="muted">no linked symptoms</span>'}</div>` +
    `</div>`
  )
}

export function renderPatientPanel(doc: PatientDoc, threshold: number): string {
  const shown = visibleDiseases(doc.diseases, threshold)
  if (doc.diseases.length === 0) {
    return `<p class="empty-state">no diseases inferred</p>`
  }
  if (shown.length === 0) {
    return (
      `<p class="empty-state">no diseases at or above ` +
      `probability ${threshold.toFixed(2)} for this patient</p>`
    )
  }
  const abnormal = doc.symptoms.filter((s) => s.code !== 0)
  const observed = abnormal.length
    ? abnormal
        .map((s) => {
          const dir = s.kind === 'binary' ? 'present' : s.code < 0 ? 'low' : 'high'
          return `<span class="obs obs-${dir}">${escapeHtml(s.name)} (${dir})</span>`
        })
        .join('')
    : '<span class="muted">all symptoms normal</span>'
  return (
    `<div class="patient-panel">` +
    shown.map(renderDiseaseRow).join('') +
    `<h3>observed abnormalities</h3><div class="observed">${observed}</div>` +
    `</div>`
  )
}

export function renderErrorBanner(message: string): string {
  return `<div class="error-banner" role="alert">${escapeHtml(message)}</div>`
}

/** Bipartite layout: diseases on the left column, symptoms on the right,
 * edge stroke width proportional to posterior probability. */
export function renderNetworkSvg(
  net: NetworkDoc,
  width = 720,
  rowHeight = 26,
): string {
  const rows = Math.max(net.diseases.length, net.symptoms.length, 1)
  const height = rowHeight * (rows + 1)
  const diseaseY = new Map<string, number>()
  const symptomY = new Map<string, number>()
  const spread = (count: number, index: number) =>
    (height * (index + 1)) / (count + 1)
  net.diseases.forEach((d, i) => diseaseY.set(d.id, spread(net.diseases.length, i)))
  net.symptoms.forEach((s, i) => symptomY.set(s.id, spread(net.symptoms.length, i)))
  const xLeft = width * 0.22
  const xRight = width * 0.78

  const edges = net.edges
    .map((e) => {
      const y1 = diseaseY.get(e.disease)
      const y2 = symptomY.get(e.symptom)
      if (y1 === undefined || y2 === undefined) return ''
      return (
        `<line x1="${xLeft}" y1="${y1}" x2="${xRight}" y2="${y2}"` +
        ` class="edge edge-${e.sign}"` +
        ` stroke-width="${edgeEmphasis(e.weight).toFixed(2)}"` +
        ` data-edge-prob="${e.weight}"><title>` +
        `${escapeHtml(e.disease)} → ${escapeHtml(e.symptom)}` +
        ` (${SIGN_LABEL[e.sign]}, p=${e.weight.toFixed(2)})</title></line>`
      )
    })
    .join('')
  const diseaseNodes = net.diseases
    .map((d) => {
      const y = diseaseY.get(d.id)!
      const cls = d.known ? 'node-disease node-known' : 'node-disease'
      return (
        `<g class="${cls}"><circle cx="${xLeft}" cy="${y}" r="7"></circle>` +
        `<text x="${xLeft - 12}" y="${y + 4}" text-anchor="end">` +
        `${escapeHtml(d.name)} (${d.prevalence})</text></g>`
      )
    })
    .join('')
  const symptomNodes = net.symptoms
    .map((s) => {
      const y = symptomY.get(s.id)!
      return (
        `<g class="node-symptom node-${s.kind}">` +
        `<rect x="${xRight - 5}" y="${y - 5}" width="10" height="10"></rect>` +
        `<text x="${xRight + 12}" y="${y + 4}">${escapeHtml(s.name)}</text></g>`
      )
    })
    .join('')
  return (
    `<svg viewBox="0 0 ${width} ${height}" class="network"` +
    ` xmlns="http://www.w3.org/2000/svg">` +
    edges +
    diseaseNodes +
    symptomNodes +
    `</svg>`
  )
}
