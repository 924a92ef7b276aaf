import { ApiClient } from './api'
import {
  renderErrorBanner,
  renderNetworkSvg,
  renderPatientPanel,
} from './render'
import './style.css'

const params = new URLSearchParams(window.location.search)
const api = new ApiClient(params.get('api') ?? 'http://localhost:8000')

const app = document.querySelector<HTMLDivElement>('#app')!
app.innerHTML = `
  <header>
    <h1>disease diagnosis recommendations</h1>
    <div id="banner"></div>
  </header>
  <section class="controls">
    <label>patient
      <input id="patient-search" list="patient-options" placeholder="search by id" />
      <datalist id="patient-options"></datalist>
    </label>
    <label>display threshold
      <input id="threshold" type="range" min="0" max="1" step="0.05" value="0.1" />
      <span id="threshold-value">0.10</span>
    </label>
  </section>
  <main>
    <section id="panel"><p class="muted">select a patient</p></section>
    <section>
      <h2>disease–symptom network</h2>
      <div id="network"></div>
    </section>
  </main>
`

const banner = document.querySelector<HTMLDivElement>('#banner')!
const panel = document.querySelector<HTMLElement>('#panel')!
const networkEl = document.querySelector<HTMLDivElement>('#network')!
const search = document.querySelector<HTMLInputElement>('#patient-search')!
const options = document.querySelector<HTMLDataListElement>('#patient-options')!
const thresholdInput = document.querySelector<HTMLInputElement>('#threshold')!
const thresholdValue = document.querySelector<HTMLSpanElement>('#threshold-value')!

let currentPatient: string | null = null
let threshold = Number(thresholdInput.value)

function showError(message: string) {
  // never leave stale data visible alongside the error
  banner.innerHTML = renderErrorBanner(message)
  panel.innerHTML = ''
  networkEl.innerHTML = ''
}

function clearError() {
  banner.innerHTML = ''
}

async function refreshPatient() {
  if (!currentPatient) return
  try {
    const doc = await api.getPatient(currentPatient)
    clearError()
    panel.innerHTML =
      `<h2>patient ${doc.id}</h2>` + renderPatientPanel(doc, threshold)
  } catch (err) {
    showError(err instanceof Error ? err.message : 'service unreachable')
  }
}

async function boot() {
  try {
    const [patients, network] = await Promise.all([
      api.listPatients(),
      api.getNetwork(),
    ])
    clearError()
    options.innerHTML = patients
      .map((p) => `<option value="${p}"></option>`)
      .join('')
    networkEl.innerHTML = renderNetworkSvg(network)
    if (patients.length && !currentPatient) {
      currentPatient = patients[0]
      search.value = currentPatient
      await refreshPatient()
    }
  } catch (err) {
    showError(err instanceof Error ? err.message : 'service unreachable')
  }
}

search.addEventListener('change', () => {
  currentPatient = search.value.trim() || null
  void refreshPatient()
})

thresholdInput.addEventListener('input', () => {
  threshold = Number(thresholdInput.value)
  thresholdValue.textContent = threshold.toFixed(2)
  void refreshPatient()
})

void boot()
