/** Typed client for the authentication service's JSON API.
 *
 * The client only ever sees session tokens, image URLs, labels and the
 * user's own assignment -- the service never sends seeds or the hidden
 * permutation, so there is nothing secret to store or leak here.
 */

export interface RegisterBegin {
  session: string
  k: number
  images: string[]
}

export interface LoginBegin {
  session: string
  k: number
  labels: string[]
  images: string[]
}

export interface ApiErrorBody {
  code: string
  message: string
}

export class ApiError extends Error {
  readonly code: string
  readonly status: number

  constructor (status: number, body: ApiErrorBody) {
    super(body.message)
    this.code = body.code
    this.status = status
  }
}

async function parse<T> (resp: Response): Promise<T> {
  const body = await resp.json()
  if (!resp.ok) {
    const err = (body as { error?: ApiErrorBody }).error
    throw new ApiError(resp.status, err ?? { code: 'internal', message: 'unknown error' })
  }
  return body as T
}

export class ApiClient {
  constructor (readonly baseUrl: string) {}

  imageUrl (path: string): string {
    return this.baseUrl + path
  }

  private async post<T> (path: string, body: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body)
    })
    return parse<T>(resp)
  }

  async health (): Promise<{ status: string, accounts: number }> {
    return parse(await fetch(this.baseUrl + '/health'))
  }

  async registerBegin (username: string, password: string): Promise<RegisterBegin> {
    return this.post('/register/begin', { username, password })
  }

  async registerComplete (session: string, labels: string[]): Promise<{ created: boolean }> {
    return this.post('/register/complete', { session, labels })
  }

  async registerReject (session: string): Promise<{ rejected: boolean }> {
    return this.post('/register/complete', { session, reject: true })
  }

  async loginBegin (username: string, password: string): Promise<LoginBegin> {
    return this.post('/login/begin', { username, password })
  }

  async loginComplete (session: string, response: number[]): Promise<{ accepted: boolean }> {
    return this.post('/login/complete', { session, response })
  }
}
