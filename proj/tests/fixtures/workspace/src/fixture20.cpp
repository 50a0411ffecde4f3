long long massBytes(unsigned short n) {
    return n * 3000000LL;
}

long long tailBytes(unsigned short n) {
    return n + 2147490000LL;
}

void archive(unsigned short n) {
    long long head = massBytes(n);
    long long tail = tailBytes(n);
    int headSlot = head;
    int tailSlot = tail;
    long long keep = headSlot + tailSlot;
    keep = keep + 20;
}
