// Typed client for the dfalloc read-only JSON service.

export interface TriggeringSymptom {
  name: string
  kind: 'binary' | 'ternary'
  sign: 'binary' | 'suppress' | 'enhance'
  edge_prob: number
  known: boolean
}

export interface PatientDisease {
  name: string
  known: boolean
  probability: number
  allocated: boolean
  triggering_symptoms: TriggeringSymptom[]
}

export interface PatientSymptom {
  name: string
  kind: 'binary' | 'ternary'
  code: number
}

export interface PatientDoc {
  id: string
  diseases: PatientDisease[]
  symptoms: PatientSymptom[]
}

export interface DiseaseSummary {
  name: string
  known: boolean
  prevalence: number
  symptoms: TriggeringSymptom[]
}

export interface NetworkNode {
  id: string
  name: string
}

export interface NetworkDiseaseNode extends NetworkNode {
  known: boolean
  prevalence: number
}

export interface NetworkSymptomNode extends NetworkNode {
  kind: 'binary' | 'ternary'
}

export interface NetworkEdge {
  symptom: string
  disease: string
  sign: 'binary' | 'suppress' | 'enhance'
  known: boolean
  weight: number
}

export interface NetworkDoc {
  schema: string
  diseases: NetworkDiseaseNode[]
  symptoms: NetworkSymptomNode[]
  edges: NetworkEdge[]
}

export class ServiceError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message)
    this.name = 'ServiceError'
  }
}

async function getJson<T>(base: string, path: string): Promise<T> {
  let response: Response
  try {
    response = await fetch(`${base}${path}`)
  } catch {
    throw new ServiceError('service unreachable')
  }
  if (!response.ok) {
    throw new ServiceError(`request failed (${response.status})`, response.status)
  }
  return response.json() as Promise<T>
}

export class ApiClient {
  constructor(readonly base: string) {}

  async listPatients(): Promise<string[]> {
    const doc = await getJson<{ patients: string[] }>(this.base, '/api/patients')
    return doc.patients
  }

  getPatient(id: string): Promise<PatientDoc> {
    return getJson<PatientDoc>(this.base, `/api/patients/${encodeURIComponent(id)}`)
  }

  async listDiseases(): Promise<DiseaseSummary[]> {
    const doc = await getJson<{ diseases: DiseaseSummary[] }>(this.base, '/api/diseases')
    return doc.diseases
  }

  getNetwork(): Promise<NetworkDoc> {
    return getJson<NetworkDoc>(this.base, '/api/network')
  }
}
