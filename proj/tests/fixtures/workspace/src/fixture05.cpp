long long chooseBucket(int flag) {
    return flag ? 3 : 250;
}

void bucketize(int flag) {
    long long bucket = chooseBucket(flag);
    int slot = bucket;
    long long hold = slot;
    hold = hold + 5;
}
