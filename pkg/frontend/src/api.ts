// Typed client for the session service. The fetch implementation is
// injectable so tests can point it at a fixture server (and so the client
// works in any runtime with a fetch-compatible function).

import type {
  DashboardData,
  ErrorBody,
  NextStep,
  PayoutDraw,
  Registration,
  SessionCreated,
  SubmitAck,
  SubmitChoiceBody,
} from './types.js'

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message)
    this.name = 'ApiError'
  }
}

export type SessionApi = {
  createSession(body: { session_id?: string; seed?: number; battery?: unknown }): Promise<SessionCreated>
  registerSubject(sessionId: string, subjectId?: string): Promise<Registration>
  nextStep(sessionId: string, subjectId: string): Promise<NextStep>
  submitChoice(sessionId: string, subjectId: string, body: SubmitChoiceBody): Promise<SubmitAck>
  finalize(sessionId: string, subjectId: string, token: string, seed?: number): Promise<PayoutDraw>
  dashboard(sessionId: string): Promise<DashboardData>
  exportRecords(sessionId: string, format: 'csv' | 'jsonl'): Promise<string>
  closeSession(sessionId: string): Promise<{ session_id: string; closed: boolean }>
}

async function fail(response: Response): Promise<never> {
  let code = `http_${response.status}`
  let message = response.statusText
  try {
    const body = (await response.json()) as Partial<ErrorBody> & { detail?: unknown }
    if (typeof body.error === 'string') {
      code = body.error
      message = body.message ?? message
    } else if (body.detail !== undefined) {
      code = 'validation_error'
      message = JSON.stringify(body.detail)
    }
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ApiError(response.status, code, message)
}

export function createSessionApi(baseUrl: string, fetchImpl?: FetchLike): SessionApi {
  const doFetch = fetchImpl ?? (fetch as FetchLike)
  const root = baseUrl.replace(/\/$/, '')

  async function request<T>(method: 'GET' | 'POST', path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method }
    if (body !== undefined) {
      init.headers = { 'Content-Type': 'application/json' }
      init.body = JSON.stringify(body)
    }
    const response = await doFetch(`${root}${path}`, init)
    if (!response.ok) {
      await fail(response)
    }
    return (await response.json()) as T
  }

  return {
    createSession(body) {
      return request('POST', '/sessions', body)
    },
    registerSubject(sessionId, subjectId) {
      const body = subjectId === undefined ? {} : { subject_id: subjectId }
      return request('POST', `/sessions/${sessionId}/subjects`, body)
    },
    nextStep(sessionId, subjectId) {
      return request('GET', `/sessions/${sessionId}/subjects/${subjectId}/next`)
    },
    submitChoice(sessionId, subjectId, body) {
      return request('POST', `/sessions/${sessionId}/subjects/${subjectId}/choices`, body)
    },
    finalize(sessionId, subjectId, token, seed) {
      const body = seed === undefined ? { token } : { token, seed }
      return request('POST', `/sessions/${sessionId}/subjects/${subjectId}/finalize`, body)
    },
    dashboard(sessionId) {
      return request('GET', `/sessions/${sessionId}/dashboard`)
    },
    async exportRecords(sessionId, format) {
      const response = await doFetch(`${root}/sessions/${sessionId}/export?format=${format}`, {
        method: 'GET',
      })
      if (!response.ok) {
        await fail(response)
      }
      return response.text()
    },
    closeSession(sessionId) {
      return request('POST', `/sessions/${sessionId}/close`)
    },
  }
}
