/** Model behind the registration labeling grid: k drafts, submit gated on
 * every draft being non-empty after trimming. */

export class LabelingModel {
  readonly k: number
  private drafts: string[]

  constructor (k: number) {
    this.k = k
    this.drafts = new Array(k).fill('')
  }

  setDraft (index: number, text: string): void {
    if (index < 0 || index >= this.k) throw new Error(`label index ${index} out of range`)
    this.drafts[index] = text
  }

  draft (index: number): string {
    return this.drafts[index]
  }

  canSubmit (): boolean {
    return this.drafts.every(d => d.trim().length > 0)
  }

  /** Trimmed labels for the wire; only valid when canSubmit(). */
  labels (): string[] {
    if (!this.canSubmit()) throw new Error('all labels must be non-empty')
    return this.drafts.map(d => d.trim())
  }

  duplicateWarning (): boolean {
    const trimmed = this.drafts.map(d => d.trim()).filter(d => d.length > 0)
    return new Set(trimmed).size !== trimmed.length
  }
}
