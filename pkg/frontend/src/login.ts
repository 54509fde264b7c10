/** Login flow: credentials, then the matching board, then a neutral verdict.
 *
 * The board shows the challenge images in their served order and the
 * user's titles alphabetically.  Assignment is drag-a-title-onto-an-image
 * with a per-title dropdown fallback; either path goes through the same
 * AssignmentModel, which cannot express a non-bijective submission and
 * translates the alphabetical display back to wire order.  Tolerance to
 * near-miss matchings is entirely server-side; a deny never says whether
 * the password or the matching was wrong.
 */

import { ApiClient, ApiError, LoginBegin } from './api.js'
import { AssignmentModel } from './assignment.js'

export class LoginView {
  private begun: LoginBegin | null = null
  model: AssignmentModel | null = null

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

  get imageUrls (): string[] {
    return this.begun?.images ?? []
  }

  renderCredentials (): void {
    this.clear()
    const form = document.createElement('form')
    form.id = 'login-credentials'
    form.innerHTML = `
      <h2>Log in</h2>
      <label>Username <input name="username" autocomplete="username" required></label>
      <label>Password <input name="password" type="password" autocomplete="current-password" required></label>
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
    try {
      this.begun = await this.api.loginBegin(username, password)
    } catch (err) {
      this.showError(err instanceof ApiError ? err.message : String(err))
      return
    }
    this.renderBoard()
  }

  renderBoard (): void {
    const begun = this.begun
    if (begun == null) throw new Error('board rendered before begin')
    this.model = new AssignmentModel(begun.labels)
    this.clear()

    const section = document.createElement('section')
    section.id = 'login-board'
    section.innerHTML = `
      <h2>Match your titles to their images</h2>
      <p class="guidance">Drag a title onto the image it describes, or pick the
      image number from the dropdown next to the title.</p>
      <div class="board">
        <div class="image-grid"></div>
        <ul class="label-list"></ul>
      </div>
      <p class="error" hidden></p>
      <button id="submit-matching" type="button" disabled>Log in</button>
    `
    const grid = section.querySelector('.image-grid') as HTMLElement
    begun.images.forEach((url, index) => {
      const cell = document.createElement('figure')
      cell.className = 'image-cell'
      cell.dataset.image = String(index + 1)
      const img = document.createElement('img')
      img.src = this.api.imageUrl(url)
      img.alt = `challenge image ${index + 1}`
      const caption = document.createElement('figcaption')
      caption.textContent = `image ${index + 1}`
      const holder = document.createElement('span')
      holder.className = 'assigned-label'
      cell.append(img, caption, holder)
      cell.addEventListener('dragover', (ev) => ev.preventDefault())
      cell.addEventListener('drop', (ev) => {
        ev.preventDefault()
        const wirePos = Number(ev.dataTransfer?.getData('text/wire-pos'))
        if (wirePos >= 1) this.assign(wirePos, index + 1)
      })
      grid.appendChild(cell)
    })

    const list = section.querySelector('.label-list') as HTMLElement
    for (const entry of this.model.display) {
      const item = document.createElement('li')
      item.draggable = true
      item.dataset.wirePos = String(entry.wirePos)
      item.addEventListener('dragstart', (ev) => {
        ev.dataTransfer?.setData('text/wire-pos', String(entry.wirePos))
      })
      const title = document.createElement('span')
      title.className = 'label-text'
      title.textContent = entry.text
      const select = document.createElement('select')
      select.dataset.wirePos = String(entry.wirePos)
      select.setAttribute('aria-label', `image for "${entry.text}"`)
      const blank = document.createElement('option')
      blank.value = ''
      blank.textContent = '—'
      select.appendChild(blank)
      for (let image = 1; image <= this.model.k; image++) {
        const option = document.createElement('option')
        option.value = String(image)
        option.textContent = `image ${image}`
        select.appendChild(option)
      }
      select.addEventListener('change', () => {
        const value = Number(select.value)
        if (value >= 1) {
          this.assign(entry.wirePos, value)
        } else {
          this.model?.clear(entry.wirePos)
          this.sync()
        }
      })
      item.append(title, select)
      list.appendChild(item)
    }

    section.querySelector('#submit-matching')!.addEventListener('click', () => {
      void this.submit()
    })
    this.root.appendChild(section)
  }

  assign (wirePos: number, image: number): void {
    if (this.model == null) return
    this.model.assign(wirePos, image)
    this.sync()
  }

  /** Re-derive every select and image caption from the model (swaps move
   * other rows, so the whole board refreshes after each assignment). */
  sync (): void {
    const model = this.model
    if (model == null) return
    for (const select of this.root.querySelectorAll<HTMLSelectElement>('select[data-wire-pos]')) {
      const wirePos = Number(select.dataset.wirePos)
      const image = model.imageFor(wirePos)
      select.value = image === undefined ? '' : String(image)
    }
    for (const cell of this.root.querySelectorAll<HTMLElement>('.image-cell')) {
      const image = Number(cell.dataset.image)
      const holder = model.labelHolding(image)
      const span = cell.querySelector('.assigned-label') as HTMLElement
      span.textContent = holder === undefined
        ? ''
        : this.model!.display.find(d => d.wirePos === holder)?.text ?? ''
    }
    const submit = this.root.querySelector('#submit-matching') as HTMLButtonElement
    submit.disabled = !model.isComplete()
  }

  async submit (): Promise<void> {
    if (this.begun == null || this.model == null || !this.model.isComplete()) return
    let accepted = false
    try {
      const result = await this.api.loginComplete(this.begun.session, this.model.toResponse())
      accepted = result.accepted
    } catch (err) {
      this.showError(err instanceof ApiError ? err.message : String(err))
      return
    }
    this.renderOutcome(accepted)
  }

  renderOutcome (accepted: boolean): void {
    this.clear()
    const section = document.createElement('section')
    section.id = 'login-outcome'
    if (accepted) {
      section.innerHTML = '<h2 class="accepted">Logged in</h2><p>Welcome back.</p>'
    } else {
      // deliberately unspecific: naming the failing factor would turn the
      // UI into a half-oracle for password guessing
      section.innerHTML = `
        <h2 class="denied">Login failed</h2>
        <p>The password and matching did not check out together.
        <a href="#/login">Try again</a>.</p>
      `
    }
    this.root.appendChild(section)
  }
}
