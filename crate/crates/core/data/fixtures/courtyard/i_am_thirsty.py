def execute_command(image):
    image_patch = ImagePatch(image)
    fountain_patches = image_patch.find('water fountain')
    if len(fountain_patches) == 0:
        return {'function': 'None', 'error': 'No water fountain found.'}
    fountain = fountain_patches[0]
    return {'function': 'navigate_to_object', 'inputs': (fountain.horizontal_center, fountain.vertical_center), 'box': [fountain.left, fountain.lower, fountain.right, fountain.upper]}
