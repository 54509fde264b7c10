/** App shell: hash routing between the two flows, service URL from
 * ?service=, localStorage, or the default local bind. */

import { ApiClient } from './api.js'
import { LoginView } from './login.js'
import { RegisterView } from './register.js'

const DEFAULT_SERVICE = 'http://127.0.0.1:8431'

export function serviceUrl (): string {
  const fromQuery = new URLSearchParams(window.location.search).get('service')
  if (fromQuery != null && fromQuery !== '') {
    window.localStorage.setItem('gotcha-service-url', fromQuery)
    return fromQuery
  }
  return window.localStorage.getItem('gotcha-service-url') ?? DEFAULT_SERVICE
}

export function mount (root: HTMLElement): void {
  const api = new ApiClient(serviceUrl())
  const render = (): void => {
    root.textContent = ''
    const view = document.createElement('main')
    root.appendChild(view)
    if (window.location.hash === '#/login') {
      new LoginView(view, api)
    } else {
      new RegisterView(view, api)
    }
  }
  window.addEventListener('hashchange', render)
  render()
}

if (typeof document !== 'undefined' && document.getElementById('app') != null) {
  mount(document.getElementById('app') as HTMLElement)
}
