/** Registration flow: credentials, then label the inkblots, then done.
 *
 * The images come back in a hidden random order; the user just titles
 * what they see.  A reject button throws the whole set away and starts
 * over with fresh images (same credentials).
 */

import { ApiClient, ApiError, RegisterBegin } from './api.js'
import { LabelingModel } from './labeling.js'

export class RegisterView {
  private username = ''
  private password = ''
  private begun: RegisterBegin | null = null
  model: LabelingModel | null = null

  constructor (readonly root: HTMLElement, readonly api: ApiClient) {
    this.renderCredentials()
  }

  private clear (): void {
    this.root.textContent = ''
  }

  private showError (message: string): void {
    const box = this.root.querySelector('.error') as HTMLElement | null
    if (box != null) {
      box.textContent = message
      box.hidden = false
    }
  }

  // -- step 1: credentials ---------------------------------------------------

  renderCredentials (): void {
    this.clear()
    const form = document.createElement('form')
    form.id = 'register-credentials'
    form.innerHTML = `
      <h2>Create account</h2>
      <label>Username <input name="username" autocomplete="username" required></label>
      <label>Password <input name="password" type="password" autocomplete="new-password" required></label>
      <button type="submit">Continue</button>
      <p class="error" hidden></p>
    `
    form.addEventListener('submit', (ev) => {
      ev.preventDefault()
      void this.begin()
    })
    this.root.appendChild(form)
  }

  async begin (): Promise<void> {
    const username = (this.root.querySelector('input[name=username]') as HTMLInputElement).value
    const password = (this.root.querySelector('input[name=password]') as HTMLInputElement).value
    this.username = username
    this.password = password
    try {
      this.begun = await this.api.registerBegin(username, password)
    } catch (err) {
      this.showError(err instanceof ApiError ? err.message : String(err))
      return
    }
    this.renderLabeling()
  }

  // -- step 2: labeling --------------------------------------------------------

  get imageUrls (): string[] {
    return this.begun?.images ?? []
  }

  renderLabeling (): void {
    const begun = this.begun
    if (begun == null) throw new Error('labeling rendered before begin')
    this.model = new LabelingModel(begun.k)
    this.clear()

    const section = document.createElement('section')
    section.id = 'register-labeling'
    section.innerHTML = `
      <h2>Title your inkblots</h2>
      <p class="guidance">Give every image a creative title: a story beats a single
      word ("a happy guy protecting himself from ticklers" is easier to recognize
      later than "mask").  You will never have to retype a title, only to
      recognize it next to these images.</p>
      <div class="blot-grid"></div>
      <p class="warning" hidden>Two titles are identical &mdash; that makes your own
      matching harder at login.</p>
      <p class="error" hidden></p>
      <button id="reject-blots" type="button">These are confusing &mdash; give me new ones</button>
      <button id="submit-labels" type="button" disabled>Create account</button>
    `
    const grid = section.querySelector('.blot-grid') as HTMLElement
    begun.images.forEach((url, index) => {
      const figure = document.createElement('figure')
      const img = document.createElement('img')
      img.src = this.api.imageUrl(url)
      img.alt = `inkblot ${index + 1}`
      const input = document.createElement('input')
      input.className = 'label-input'
      input.dataset.index = String(index)
      input.placeholder = `title for image ${index + 1}`
      input.maxLength = 128
      input.addEventListener('input', () => {
        this.setLabel(index, input.value)
      })
      figure.appendChild(img)
      figure.appendChild(input)
      grid.appendChild(figure)
    })
    section.querySelector('#reject-blots')!.addEventListener('click', () => {
      void this.reject()
    })
    section.querySelector('#submit-labels')!.addEventListener('click', () => {
      void this.submitLabels()
    })
    this.root.appendChild(section)
  }

  setLabel (index: number, text: string): void {
    if (this.model == null) return
    this.model.setDraft(index, text)
    const submit = this.root.querySelector('#submit-labels') as HTMLButtonElement
    submit.disabled = !this.model.canSubmit()
    const warning = this.root.querySelector('.warning') as HTMLElement
    warning.hidden = !this.model.duplicateWarning()
  }

  async reject (): Promise<void> {
    if (this.begun == null) return
    try {
      await this.api.registerReject(this.begun.session)
      this.begun = await this.api.registerBegin(this.username, this.password)
    } catch (err) {
      this.showError(err instanceof ApiError ? err.message : String(err))
      return
    }
    this.renderLabeling()
  }

  async submitLabels (): Promise<void> {
    if (this.begun == null || this.model == null || !this.model.canSubmit()) return
    try {
      await this.api.registerComplete(this.begun.session, this.model.labels())
    } catch (err) {
      if (err instanceof ApiError && err.code === 'unknown_session') {
        this.showError('Session expired; starting over with fresh images.')
        this.begun = await this.api.registerBegin(this.username, this.password)
        this.renderLabeling()
        return
      }
      this.showError(err instanceof ApiError ? err.message : String(err))
      return
    }
    this.renderDone()
  }

  // -- step 3 -------------------------------------------------------------------

  renderDone (): void {
    this.clear()
    const section = document.createElement('section')
    section.id = 'register-done'
    section.innerHTML = `
      <h2>Account created</h2>
      <p>Registered as <strong></strong>.</p>
      <a href="#/login">Log in</a>
    `
    section.querySelector('strong')!.textContent = this.username
    this.root.appendChild(section)
  }
}
